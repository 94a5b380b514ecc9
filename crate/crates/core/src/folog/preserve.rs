use std::sync::Arc;

use crate::congruence::{con_lattice_with, Partition};
use crate::limits::{map_ordered, Limits};
use crate::model::FiniteStructure;
use crate::quotient::quotient_structure;

use super::eval::Compiled;
use super::pcnf::{is_quotient_safe, to_pcnf};
use super::syntax::Formula;
use super::FormulaError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationRow {
    pub congruence: Partition,
    pub quotient_size: usize,
    pub holds: bool,
}

/// Truth of a sentence in every quotient of a model of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationReport {
    pub formula: String,
    pub pcnf: String,
    pub safe: bool,
    pub rows: Vec<PreservationRow>,
}

impl PreservationReport {
    /// Quotients falsifying a quotient-safe sentence. Always expected empty.
    pub fn defects(&self) -> Vec<&PreservationRow> {
        if self.safe {
            self.rows.iter().filter(|r| !r.holds).collect()
        } else {
            Vec::new()
        }
    }

    /// Quotients falsifying an unsafe sentence; these are informative only.
    pub fn counterexamples(&self) -> Vec<&PreservationRow> {
        if self.safe {
            Vec::new()
        } else {
            self.rows.iter().filter(|r| !r.holds).collect()
        }
    }
}

pub fn preservation_check(
    m: &FiniteStructure,
    phi: &Formula,
) -> Result<PreservationReport, FormulaError> {
    preservation_check_with(m, phi, &Limits::default())
}

pub fn preservation_check_with(
    m: &FiniteStructure,
    phi: &Formula,
    limits: &Limits,
) -> Result<PreservationReport, FormulaError> {
    if let Some(v) = phi.free_vars().into_iter().next() {
        return Err(FormulaError::NotClosed {
            formula: phi.to_string(),
            var: v,
        });
    }
    let compiled = Compiled::new(m.signature(), phi)?;
    if !compiled.eval_values(m, &[]) {
        return Err(FormulaError::PremiseFails(phi.to_string()));
    }
    let pcnf = to_pcnf(phi);
    let safe = is_quotient_safe(&pcnf)?;
    let lattice = con_lattice_with(m, limits)?;
    let base = Arc::new(m.clone());
    let rows = map_ordered(limits.exec, lattice.elements(), |theta| {
        let q = quotient_structure(&base, theta).expect("lattice elements are congruences");
        PreservationRow {
            congruence: theta.clone(),
            quotient_size: q.structure.size(),
            holds: compiled.eval_values(&q.structure, &[]),
        }
    });
    Ok(PreservationReport {
        formula: phi.to_string(),
        pcnf: pcnf.to_string(),
        safe,
        rows,
    })
}
