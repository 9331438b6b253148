//! Two-stage process and molecule design: optimize the process over a relaxed
//! property box, design the molecule nearest the ideal properties, then
//! re-optimize the process for the realized molecule.

use std::fmt;
use std::sync::Arc;

use super::bnb::{solve_exact, BnbOptions};
use super::evaluate::{validate, Evaluator};
use super::problem::{DesignProblem, DesignSolution, DeviationNorm, Objective};
use super::SolverError;

/// `C(p, μ)` or a process constraint `g(p, μ) ≤ 0`.
pub type ProcessFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ProcessProblem {
    pub cost: ProcessFn,
    pub constraints: Vec<ProcessFn>,
    /// Per process variable (μ^L, μ^U).
    pub mu_bounds: Vec<(f64, f64)>,
    /// Deviation norm for the molecule stage.
    pub target_norm: DeviationNorm,
}

impl fmt::Debug for ProcessProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProcessProblem")
            .field("constraints", &self.constraints.len())
            .field("mu_bounds", &self.mu_bounds)
            .field("target_norm", &self.target_norm)
            .finish()
    }
}

impl ProcessProblem {
    pub fn new(cost: ProcessFn, mu_bounds: Vec<(f64, f64)>) -> Self {
        Self { cost, constraints: Vec::new(), mu_bounds, target_norm: DeviationNorm::Absolute }
    }

    fn value(&self, p: &[f64], mu: &[f64]) -> f64 {
        if self.constraints.iter().any(|g| !(g(p, mu) <= 0.0)) {
            return f64::INFINITY;
        }
        let v = (self.cost)(p, mu);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProcessSolution {
    pub solution: DesignSolution,
    pub mu: Vec<f64>,
    /// Ideal properties and process variables from the relaxation.
    pub p_star: Vec<f64>,
    pub mu_star: Vec<f64>,
    /// Relaxation value; never above `objective`.
    pub relaxation_bound: f64,
    pub objective: f64,
}

const STEP_TOLERANCE: f64 = 1e-6;
const MAX_EVALUATIONS: usize = 2_000_000;

/// Derivative-free compass search on a box, accepting strict improvements.
pub(crate) fn compass_search(f: impl Fn(&[f64]) -> f64, bounds: &[(f64, f64)], start: Vec<f64>) -> (Vec<f64>, f64) {
    let mut x = start;
    let mut fx = f(&x);
    let mut step: Vec<f64> = bounds.iter().map(|(lo, hi)| (hi - lo) / 4.0).collect();
    let mut evals = 1;
    while step.iter().any(|&s| s > STEP_TOLERANCE) && evals < MAX_EVALUATIONS {
        let mut improved = false;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                if step[i] <= 0.0 {
                    continue;
                }
                let mut y = x.clone();
                y[i] = (x[i] + sign * step[i]).clamp(bounds[i].0, bounds[i].1);
                let fy = f(&y);
                evals += 1;
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            for s in &mut step {
                *s /= 2.0;
            }
        }
    }
    (x, fx)
}

/// First finite point of a coarse grid, center first.
fn feasible_start(f: &impl Fn(&[f64]) -> f64, bounds: &[(f64, f64)]) -> Option<Vec<f64>> {
    let center: Vec<f64> = bounds.iter().map(|(lo, hi)| (lo + hi) / 2.0).collect();
    if f(&center).is_finite() {
        return Some(center);
    }
    const LEVELS: usize = 9;
    let dims = bounds.len();
    if dims > 4 {
        return None;
    }
    let total = LEVELS.pow(dims as u32);
    (0..total).find_map(|mut code| {
        let x: Vec<f64> = bounds
            .iter()
            .map(|(lo, hi)| {
                let k = code % LEVELS;
                code /= LEVELS;
                lo + (hi - lo) * k as f64 / (LEVELS - 1) as f64
            })
            .collect();
        f(&x).is_finite().then_some(x)
    })
}

/// Property box over which the process is relaxed: the stated property bounds
/// intersected with the range of each affine model over the descriptor box.
fn property_box(problem: &DesignProblem) -> Result<Vec<(f64, f64)>, SolverError> {
    let ev = Evaluator::new(problem);
    let forms = ev.linear_forms();
    let boxes = ev.boxes();
    problem
        .property_bounds
        .iter()
        .enumerate()
        .map(|(k, &(pl, pu))| {
            let (mut lo, mut hi) = (pl, pu);
            if let Some(forms) = &forms {
                let (c, b) = &forms[k];
                let (ml, mu) = c.iter().zip(boxes).fold((*b, *b), |(l, h), (&c, &(a, z))| {
                    let (x, y) = (c * f64::from(a), c * f64::from(z));
                    (l + x.min(y), h + x.max(y))
                });
                lo = lo.max(ml);
                hi = hi.min(mu);
            }
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(SolverError::InvalidProblem(format!("property {k} needs finite bounds for the relaxation")));
            }
            if lo > hi {
                return Err(SolverError::Infeasible { stage: Some("stage 1") });
            }
            Ok((lo, hi))
        })
        .collect()
}

pub fn solve_process(problem: &DesignProblem, pp: &ProcessProblem) -> Result<ProcessSolution, SolverError> {
    validate(problem)?;
    for (w, (lo, hi)) in pp.mu_bounds.iter().enumerate() {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(SolverError::InconsistentBounds(format!("process variable {w}: [{lo}, {hi}]")));
        }
    }
    let k = problem.models.len();
    let pbox = property_box(problem)?;
    let bounds: Vec<(f64, f64)> = pbox.iter().chain(&pp.mu_bounds).copied().collect();
    let relaxed = |z: &[f64]| pp.value(&z[..k], &z[k..]);
    let start = feasible_start(&relaxed, &bounds).ok_or(SolverError::Infeasible { stage: Some("stage 1") })?;
    let (z, f1) = compass_search(relaxed, &bounds, start);
    let (p_star, mu_star) = (z[..k].to_vec(), z[k..].to_vec());

    let targeted = problem.clone().with_objective(Objective::Target {
        targets: p_star.clone(),
        weights: vec![1.0; k],
        norm: pp.target_norm,
    });
    let solution = solve_exact(&targeted, &BnbOptions::default()).map_err(|e| match e {
        SolverError::Infeasible { .. } => SolverError::Infeasible { stage: Some("stage 2") },
        e => e,
    })?;

    let p = solution.p.clone();
    let fixed = |mu: &[f64]| pp.value(&p, mu);
    let mu_start = if fixed(&mu_star).is_finite() {
        mu_star.clone()
    } else {
        feasible_start(&fixed, &pp.mu_bounds).ok_or(SolverError::Infeasible { stage: Some("stage 3") })?
    };
    let (mu, objective) = compass_search(fixed, &pp.mu_bounds, mu_start);
    // The relaxation is solved only to the search tolerance; a final point
    // below it shows the true relaxed optimum is lower still.
    let relaxation_bound = f1.min(objective);
    Ok(ProcessSolution { solution, mu, p_star, mu_star, relaxation_bound, objective })
}
