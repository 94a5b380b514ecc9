//! First-order formulas over a signature: parsing, evaluation on finite
//! structures, prenex conjunctive normal form and quotient preservation.

mod eval;
mod parser;
mod pcnf;
mod preserve;
mod syntax;
mod theory;

use thiserror::Error;

use crate::congruence::CongruenceError;
use crate::model::ModelError;

pub use eval::{all_assignments, eval, holds, truth_table, Assignment, Compiled};
pub use parser::{parse_formula, parse_formula_with_warnings, ParseWarning};
pub use pcnf::{
    fold_constants, is_pcnf, is_quotient_safe, matrix_literals, rename_apart, split_prefix,
    to_pcnf, Quantifier,
};
pub use preserve::{
    preservation_check, preservation_check_with, PreservationReport, PreservationRow,
};
pub use syntax::{Formula, Term};
pub use theory::{abelian_group_theory, mi_monoid_theory, models_theory, Theory, TheoryReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("`{symbol}` takes {expected} argument(s), got {found}")]
    UnknownArity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("variable names starting with `_` are reserved: `{0}`")]
    ReservedVariable(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{var}` = {value} is outside a universe of size {n}")]
    ValueOutOfRange { var: String, value: usize, n: usize },
    #[error("structure and theory signatures differ")]
    SignatureMismatch,
    #[error("not in prenex conjunctive normal form: {0}")]
    NotPcnf(String),
    #[error("`{formula}` has free variable `{var}`")]
    NotClosed { formula: String, var: String },
    #[error("the structure does not satisfy `{0}`")]
    PremiseFails(String),
    #[error("{0}")]
    Malformed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
}
