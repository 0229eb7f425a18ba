//! Proto-formulas, their skeleton designs, and the two fallacy detectors.

mod ast;
mod fallacy;
mod parse;
mod skeleton;

use thiserror::Error;

pub use ast::{Domain, Domains, Formula, Term};
pub use fallacy::{detect_petitio, detect_presupposition_gap, Evidence, PetitioFinding};
pub use parse::parse_formula;
pub use skeleton::{skeletonize, AtomPolicy, AtomTreatment, Numbering};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("atom `{atom}` used with {found} arguments, expected {expected}")]
    Arity {
        atom: String,
        expected: usize,
        found: usize,
    },
}
