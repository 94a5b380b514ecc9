use serde_json::{json, Value};

use crate::json::{signature_from_json, signature_to_json};
use crate::model::{FiniteStructure, Signature};

use super::eval::Compiled;
use super::parser::parse_formula;
use super::syntax::Formula;
use super::FormulaError;

/// A named set of closed axioms over a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    name: String,
    signature: Signature,
    axioms: Vec<Formula>,
}

impl Theory {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        axioms: Vec<Formula>,
    ) -> Result<Theory, FormulaError> {
        for a in &axioms {
            if let Some(v) = a.free_vars().into_iter().next() {
                return Err(FormulaError::NotClosed {
                    formula: a.to_string(),
                    var: v,
                });
            }
            // Compiling checks every symbol against the signature.
            Compiled::new(&signature, a)?;
        }
        Ok(Theory {
            name: name.into(),
            signature,
            axioms,
        })
    }

    /// Parses each axiom against `signature`.
    pub fn parse(
        name: impl Into<String>,
        signature: Signature,
        axioms: &[&str],
    ) -> Result<Theory, FormulaError> {
        let parsed = axioms
            .iter()
            .map(|a| parse_formula(&signature, a))
            .collect::<Result<Vec<_>, _>>()?;
        Theory::new(name, signature, parsed)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn axioms(&self) -> &[Formula] {
        &self.axioms
    }

    /// Reads `{"name", "signature", "axioms": [strings]}`.
    pub fn from_json(value: &Value) -> Result<Theory, FormulaError> {
        let bad = |msg: &str| FormulaError::Malformed(msg.to_string());
        let name = value
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("theory lacks a string `name`"))?;
        let sig = signature_from_json(
            value
                .get("signature")
                .ok_or_else(|| bad("theory lacks a `signature`"))?,
        )?;
        let axioms = value
            .get("axioms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("theory lacks an `axioms` array"))?
            .iter()
            .map(|a| a.as_str().ok_or_else(|| bad("axioms must be strings")))
            .collect::<Result<Vec<_>, _>>()?;
        Theory::parse(name, sig, &axioms)
    }

    pub fn from_json_str(text: &str) -> Result<Theory, FormulaError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| FormulaError::Malformed(e.to_string()))?;
        Theory::from_json(&value)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "signature": signature_to_json(&self.signature),
            "axioms": self.axioms.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Per-axiom truth values of a theory in a structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryReport {
    pub theory: String,
    pub axioms: Vec<(String, bool)>,
}

impl TheoryReport {
    pub fn holds(&self) -> bool {
        self.axioms.iter().all(|(_, b)| *b)
    }
}

pub fn models_theory(m: &FiniteStructure, t: &Theory) -> Result<TheoryReport, FormulaError> {
    if !m.signature().same_symbols(t.signature()) {
        return Err(FormulaError::SignatureMismatch);
    }
    let axioms = t
        .axioms()
        .iter()
        .map(|a| {
            let c = Compiled::new(m.signature(), a)?;
            Ok((a.to_string(), c.eval_values(m, &[])))
        })
        .collect::<Result<Vec<_>, FormulaError>>()?;
    Ok(TheoryReport {
        theory: t.name().to_string(),
        axioms,
    })
}

/// Monoids with a central pseudoidentity: associativity, a pseudoidentity
/// that is a two-sided identity, closure of `E` under `op`, and centrality
/// of `E`.
pub fn mi_monoid_theory() -> Theory {
    let sig = Signature::of(&[("op", 2)], &[("E", 1)]).expect("valid signature");
    Theory::parse(
        "mi-monoid",
        sig,
        &[
            "forall x. forall y. forall z. op(op(x,y),z) = op(x,op(y,z))",
            "exists e. forall x. (~E(e) | op(x,e) = x) & (~E(e) | op(e,x) = x)",
            "forall a. forall b. ~E(a) | ~E(b) | E(op(a,b))",
            "forall x. forall a. ~E(a) | op(x,a) = op(a,x)",
        ],
    )
    .expect("axioms parse")
}

/// Abelian groups in the signature `add/2, neg/1, zero/0`.
pub fn abelian_group_theory() -> Theory {
    Theory::parse(
        "abelian-group",
        crate::fixtures::group_signature(),
        &[
            "forall x. forall y. forall z. add(add(x,y),z) = add(x,add(y,z))",
            "forall x. add(x,zero) = x",
            "forall x. add(x,neg(x)) = zero",
            "forall x. forall y. add(x,y) = add(y,x)",
        ],
    )
    .expect("axioms parse")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::folog::{is_quotient_safe, to_pcnf};

    #[test]
    fn mi_monoid_axioms() {
        let t = mi_monoid_theory();
        assert_eq!(t.axioms().len(), 4);
        for a in t.axioms() {
            assert_eq!(is_quotient_safe(&to_pcnf(a)), Ok(true), "{a}");
        }
        let r = models_theory(&fixtures::mi2(), &t).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(
            models_theory(&fixtures::flag(), &t),
            Err(FormulaError::SignatureMismatch)
        );
    }

    #[test]
    fn pseudoidentity_axiom_is_safe_as_written() {
        // Already in PCNF: one existential, one universal, two clauses.
        let t = mi_monoid_theory();
        let a = &t.axioms()[1];
        assert!(crate::folog::is_pcnf(a));
        assert_eq!(is_quotient_safe(a), Ok(true));
    }

    #[test]
    fn abelian_groups() {
        let t = abelian_group_theory();
        for a in t.axioms() {
            assert_eq!(is_quotient_safe(&to_pcnf(a)), Ok(true));
        }
        assert!(models_theory(&fixtures::z6(), &t).unwrap().holds());
        assert!(models_theory(&fixtures::z1(), &t).unwrap().holds());
    }

    #[test]
    fn json_round_trip() {
        let t = mi_monoid_theory();
        let back = Theory::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn open_axioms_rejected() {
        let sig = fixtures::group_signature();
        assert!(matches!(
            Theory::parse("bad", sig, &["add(x, zero) = x"]),
            Err(FormulaError::NotClosed { .. })
        ));
    }

    #[test]
    fn failing_axiom_reported() {
        let sig = fixtures::group_signature();
        let t = Theory::parse("trivial", sig, &["forall x. x = zero"]).unwrap();
        let r = models_theory(&fixtures::z6(), &t).unwrap();
        assert!(!r.holds());
        assert_eq!(r.axioms, vec![("forall x. x = zero".to_string(), false)]);
    }
}
