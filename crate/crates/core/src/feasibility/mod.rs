//! Structural feasibility: can a descriptor vector be realized by a molecule?

mod assemble;
mod gc;
mod sd;
mod ti;

pub use assemble::{assemble_structures, Assembly};
pub use gc::{check_gc_aromatic, check_gc_basic, GcFeasibilityReport, SufficiencyCheck};
pub use sd::{check_sd_feasibility, SdConstraintData, SdFeasibilityReport};
pub use ti::{check_ti_feasibility, NodeType, TiAssignment, TiFeasibilityReport};

use std::fmt;

use thiserror::Error;

use crate::graph::GraphError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeasibilityError {
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("unknown signature `{0}`")]
    UnknownSignature(String),
    #[error("signature `{signature}` does not have height {height}")]
    HeightMismatch { signature: String, height: u32 },
    #[error("group `{0}` has no atom pattern")]
    MissingPattern(String),
    #[error("counts are consistent but no connected structure can be assembled")]
    NoAssembly,
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One evaluated constraint. `residual` is lhs − rhs in exact integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub residual: i64,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, pass: bool, residual: i64) -> Self {
        Self { name: name.into(), pass, residual }
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.name, if self.pass { "pass" } else { "fail" }, self.residual)
    }
}

/// Writes `name pass|fail residual` lines.
pub fn write_lines(f: &mut fmt::Formatter<'_>, lines: &[CheckLine]) -> fmt::Result {
    for l in lines {
        writeln!(f, "{l}")?;
    }
    Ok(())
}
