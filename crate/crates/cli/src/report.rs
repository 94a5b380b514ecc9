//! Machine-readable reports printed under `--json`. Every report
//! deserializes back into the same type.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SymbolInfo {
    pub name: String,
    pub arity: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ValidateReport {
    pub file: String,
    pub valid: bool,
    pub error: Option<String>,
    pub name: Option<String>,
    pub size: Option<usize>,
    pub functions: Vec<SymbolInfo>,
    pub relations: Vec<SymbolInfo>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ConReport {
    pub structure: String,
    pub size: usize,
    /// Canonical order: finest first.
    pub congruences: Vec<String>,
    /// Hasse edges as `(lower, upper)` indices into `congruences`.
    pub covers: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct QuotientReport {
    pub structure: String,
    pub congruence: String,
    pub is_congruence: bool,
    pub violation: Option<String>,
    pub size: Option<usize>,
    pub projection: Option<Vec<usize>>,
    pub quotient: Option<Value>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct HomCheckReport {
    pub source: String,
    pub target: String,
    pub map: Vec<usize>,
    pub strong_hom: bool,
    pub violation: Option<String>,
    pub surjective: bool,
    pub injective: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct HomEnumReport {
    pub source: String,
    pub target: String,
    pub filter: String,
    pub count: usize,
    pub homs: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TheoremRow {
    pub theorem: String,
    pub instances: usize,
    pub defects: usize,
    pub details: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct IsoTheoremsReport {
    pub structure: String,
    pub rows: Vec<TheoremRow>,
    pub skipped_targets: Vec<String>,
    pub total_instances: usize,
    pub total_defects: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub structure: String,
    pub formula: String,
    pub assignment: BTreeMap<String, usize>,
    pub value: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PcnfEntry {
    pub formula: String,
    pub pcnf: String,
    pub quotient_safe: bool,
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PcnfReport {
    pub formulas: Vec<PcnfEntry>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct QuotientTruth {
    pub congruence: String,
    pub size: usize,
    pub holds: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PreserveEntry {
    pub formula: String,
    pub premise_holds: bool,
    pub pcnf: Option<String>,
    pub quotient_safe: Option<bool>,
    pub quotients: Vec<QuotientTruth>,
    /// Quotients falsifying a quotient-safe formula.
    pub defects: usize,
    /// Quotients falsifying an unsafe formula; informative only.
    pub counterexamples: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PreserveReport {
    pub structure: String,
    pub formulas: Vec<PreserveEntry>,
    pub total_defects: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct QuotientClass {
    pub kernel: String,
    pub size: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct FquotReport {
    pub structure: String,
    pub classes: Vec<QuotientClass>,
    /// Hasse edges of the factorization order.
    pub covers: Vec<(usize, usize)>,
    pub congruences: usize,
    pub order_entries: usize,
    pub order_mismatches: Vec<(usize, usize)>,
    pub kernel_defects: Vec<usize>,
    pub agrees: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct FreeWitnessReport {
    pub target: usize,
    pub target_name: String,
    pub assignment: Vec<usize>,
    pub extensions: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct FreeCheckReport {
    pub structure: String,
    pub generators: Vec<usize>,
    pub targets: usize,
    pub checked: usize,
    pub failures: usize,
    pub passed: bool,
    pub witness: Option<FreeWitnessReport>,
}
