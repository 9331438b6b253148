//! Design problem types and the drivers that solve them.

mod bnb;
mod enumerate;
mod evaluate;
mod heuristic;
mod mixture;
mod problem;
mod process;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::feasibility::{assemble_structures, FeasibilityError};
use crate::gc::GcError;

pub use bnb::{solve_direct, solve_exact, solve_target, BnbOptions};
pub use enumerate::{enumerate_feasible, enumerate_feasible_capped, search_space_size, DEFAULT_ENUMERATION_CAP};
pub use evaluate::Evaluation;
pub use heuristic::{ga_solve, sa_solve, tabu_solve, GaParams, SaParams, TabuParams};
pub use mixture::{solve_mixture, MixingModel, MixtureObjective, MixtureProblem, MixtureSolution};
pub use problem::*;
pub use process::{solve_process, ProcessProblem, ProcessSolution};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("infeasible{}", stage.map(|s| format!(" at {s}")).unwrap_or_default())]
    Infeasible { stage: Option<&'static str> },
    #[error("search space of about {estimated} points exceeds the cap of {cap}")]
    SearchSpaceTooLarge { estimated: u64, cap: u64 },
    #[error("no feasible individual found")]
    NoFeasibleIndividual,
    #[error("no feasible starting point found")]
    NoFeasibleStart,
    #[error("no candidate components")]
    NoCandidates,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("inconsistent bounds: {0}")]
    InconsistentBounds(String),
    #[error(transparent)]
    Model(#[from] GcError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

/// Driver selection for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Bnb,
    Enumerate,
    Ga,
    Tabu,
    Sa,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Bnb => "bnb",
            SolverKind::Enumerate => "enum",
            SolverKind::Ga => "ga",
            SolverKind::Tabu => "tabu",
            SolverKind::Sa => "sa",
        })
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bnb" => Ok(SolverKind::Bnb),
            "enum" => Ok(SolverKind::Enumerate),
            "ga" => Ok(SolverKind::Ga),
            "tabu" => Ok(SolverKind::Tabu),
            "sa" => Ok(SolverKind::Sa),
            _ => Err(format!("unknown solver `{s}`")),
        }
    }
}

/// Best solution under `kind` with default parameters.
pub fn solve(problem: &DesignProblem, kind: SolverKind, seed: u64) -> Result<DesignSolution, SolverError> {
    match kind {
        SolverKind::Bnb => solve_exact(problem, &BnbOptions::default()),
        SolverKind::Enumerate => solve_exact(problem, &BnbOptions { force_enumeration: true, ..Default::default() }),
        SolverKind::Ga => ga_solve(problem, &GaParams { seed, ..Default::default() }),
        SolverKind::Tabu => tabu_solve(problem, &TabuParams { seed, ..Default::default() }),
        SolverKind::Sa => sa_solve(problem, &SaParams { seed, ..Default::default() }),
    }
}

/// Fills `solution.structures` with up to `max` assembled graphs when the
/// problem carries a library whose groups all have fragments.
pub fn attach_structures(problem: &DesignProblem, solution: &mut DesignSolution, max: usize) {
    let Some(lib) = problem.structure.library() else {
        return;
    };
    if let Ok(a) = assemble_structures(&solution.n, lib, max) {
        solution.structures = a.structures;
    }
}
