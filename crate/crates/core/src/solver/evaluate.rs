//! Candidate evaluation: bounds, structure, properties, constraints, objective.

use super::problem::*;
use super::SolverError;
use crate::descriptor::DescriptorVector;
use crate::feasibility::{check_gc_aromatic, check_gc_basic, check_sd_feasibility};
use crate::gc::{estimate_gc, GcModel};

/// Full evaluation of a feasible candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub p: Vec<f64>,
    /// Objective in the user's sense.
    pub objective: f64,
    /// Minimization score: the objective, negated when maximizing.
    pub score: f64,
}

pub(crate) fn validate(problem: &DesignProblem) -> Result<(), SolverError> {
    let invalid = |s: String| Err(SolverError::InvalidProblem(s));
    if problem.descriptors.is_empty() {
        return invalid("no descriptors".into());
    }
    let mut names = problem.descriptors.clone();
    names.sort();
    names.dedup();
    if names.len() != problem.descriptors.len() {
        return invalid("duplicate descriptor".into());
    }
    let known = |d: &str| problem.descriptors.iter().any(|x| x == d);
    for m in &problem.models {
        for g in m.coefficients.keys().chain(m.interactions.iter().flat_map(|t| [&t.g, &t.g_prime])) {
            if !known(g) {
                return invalid(format!("model `{}` refers to unknown descriptor `{g}`", m.property));
            }
        }
    }
    for d in problem.descriptor_bounds.keys().chain(problem.fixed.keys()) {
        if !known(d) {
            return invalid(format!("bound on unknown descriptor `{d}`"));
        }
    }
    if let Some(lib) = problem.structure.library() {
        for d in &problem.descriptors {
            if lib.get(d).is_none() {
                return invalid(format!("descriptor `{d}` is not in the group library"));
            }
        }
    }
    if problem.property_bounds.len() != problem.models.len() {
        return invalid(format!(
            "{} property bounds for {} models",
            problem.property_bounds.len(),
            problem.models.len()
        ));
    }
    for (k, &(lo, hi)) in problem.property_bounds.iter().enumerate() {
        if lo > hi {
            return Err(SolverError::InconsistentBounds(format!("property {k}: {lo} > {hi}")));
        }
    }
    for (d, &(lo, hi)) in &problem.descriptor_bounds {
        if lo > hi {
            return Err(SolverError::InconsistentBounds(format!("descriptor {d}: {lo} > {hi}")));
        }
    }
    let (nl, nu) = problem.total_bounds;
    if nl > nu {
        return Err(SolverError::InconsistentBounds(format!("total: {nl} > {nu}")));
    }
    let k = problem.models.len();
    match &problem.objective {
        Objective::Feasibility => {}
        Objective::Target { targets, weights, .. } => {
            if targets.len() != k || weights.len() != k {
                return invalid(format!("target mode needs {k} targets and weights"));
            }
            if weights.iter().any(|w| !(*w >= 0.0)) {
                return invalid("target weights must be non-negative".into());
            }
        }
        Objective::Direct { function, .. } => match function {
            DirectFn::Property(i) if *i >= k => return invalid(format!("no property {i}")),
            DirectFn::Linear { coefficients, .. } if coefficients.len() != k => {
                return invalid(format!("linear objective needs {k} coefficients"))
            }
            DirectFn::SquaredDistance { targets, weights } if targets.len() != k || weights.len() != k => {
                return invalid(format!("distance objective needs {k} targets and weights"))
            }
            _ => {}
        },
    }
    Ok(())
}

pub(crate) struct Evaluator<'a> {
    pub problem: &'a DesignProblem,
    boxes: Vec<(u32, u32)>,
    /// Models with a zero coefficient for every descriptor they omit.
    models: Vec<GcModel>,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a DesignProblem) -> Self {
        let models = problem
            .models
            .iter()
            .map(|m| {
                let mut m = m.clone();
                for d in &problem.descriptors {
                    m.coefficients.entry(d.clone()).or_insert(0.0);
                }
                m
            })
            .collect();
        Self { problem, boxes: problem.boxes(), models }
    }

    /// Per model, the coefficient of each descriptor (in descriptor order) and
    /// the constant term, when every model is affine in `n`.
    pub fn linear_forms(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        self.models
            .iter()
            .map(|m| {
                if !m.is_linear() {
                    return None;
                }
                let (a, b) = m.transform.as_affine()?;
                Some((self.problem.descriptors.iter().map(|d| a * m.coefficient(d)).collect(), b))
            })
            .collect()
    }

    pub fn boxes(&self) -> &[(u32, u32)] {
        &self.boxes
    }

    pub fn in_bounds(&self, dense: &[u32]) -> bool {
        let total: u32 = dense.iter().sum();
        let (nl, nu) = self.problem.total_bounds;
        total >= nl.max(1) && total <= nu && dense.iter().zip(&self.boxes).all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }

    pub fn structure_ok(&self, n: &DescriptorVector) -> bool {
        match &self.problem.structure {
            StructureCheck::None => true,
            StructureCheck::GcBasic { library, m } => match m {
                Some(m) => check_gc_basic(n, library, *m).is_ok_and(|r| r.ok()),
                None => (-1..=1).any(|m| check_gc_basic(n, library, m).is_ok_and(|r| r.ok())),
            },
            StructureCheck::GcAromatic { library, rings, max_aliphatic_rings } => match rings {
                Some(r) => check_gc_aromatic(n, library, r.aromatic as u32, r.aliphatic as u32).is_ok_and(|r| r.ok()),
                None => {
                    let atoms: u32 = n.iter().map(|(g, c)| library.get(g).map_or(0, |g| g.aromatic_atom_count) * c).sum();
                    if !atoms.is_multiple_of(6) {
                        return false;
                    }
                    (0..=*max_aliphatic_rings)
                        .any(|ali| check_gc_aromatic(n, library, atoms / 6, ali).is_ok_and(|r| r.ok()))
                }
            },
            StructureCheck::Sd { data } => check_sd_feasibility(n, data).is_ok_and(|r| r.ok()),
        }
    }

    /// Property estimates; `None` when a model is undefined at `n`.
    pub fn properties(&self, n: &DescriptorVector) -> Option<Vec<f64>> {
        self.models.iter().map(|m| estimate_gc(m, n).ok()).collect()
    }

    pub fn property_bounds_ok(&self, p: &[f64]) -> bool {
        p.iter().zip(&self.problem.property_bounds).all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }

    pub fn objective(&self, n: &DescriptorVector, p: &[f64]) -> (f64, f64) {
        match &self.problem.objective {
            Objective::Feasibility => (0.0, 0.0),
            Objective::Target { targets, weights, norm } => {
                let v = target_distance(targets, weights, *norm, p);
                (v, v)
            }
            Objective::Direct { sense, function } => {
                let v = match function {
                    DirectFn::Property(k) => p[*k],
                    DirectFn::Linear { coefficients, constant } => {
                        coefficients.iter().zip(p).map(|(c, x)| c * x).sum::<f64>() + constant
                    }
                    DirectFn::SquaredDistance { targets, weights } => {
                        target_distance(targets, weights, DeviationNorm::Squared, p)
                    }
                    DirectFn::Custom { eval, .. } => eval(n, p),
                };
                match sense {
                    Sense::Minimize => (v, v),
                    Sense::Maximize => (v, -v),
                }
            }
        }
    }

    /// Evaluates a candidate, returning `None` if any constraint fails.
    pub fn evaluate(&self, dense: &[u32]) -> Option<Evaluation> {
        if !self.in_bounds(dense) {
            return None;
        }
        let n = self.problem.to_vector(dense);
        if !self.structure_ok(&n) {
            return None;
        }
        let p = self.properties(&n)?;
        if !self.property_bounds_ok(&p) || !self.problem.constraints.iter().all(|c| c.satisfied(&n, &p)) {
            return None;
        }
        let (objective, score) = self.objective(&n, &p);
        if !score.is_finite() {
            return None;
        }
        Some(Evaluation { p, objective, score })
    }

    pub fn solution(&self, dense: &[u32], e: Evaluation, optimality: Optimality) -> DesignSolution {
        let deviations = match &self.problem.objective {
            Objective::Target { targets, .. } => {
                targets.iter().zip(&e.p).map(|(&t, &p)| TargetDeviation::new(t, p)).collect()
            }
            _ => Vec::new(),
        };
        DesignSolution {
            n: self.problem.to_vector(dense),
            p: e.p,
            objective: e.objective,
            optimality,
            deviations,
            structures: Vec::new(),
        }
    }
}

pub(crate) fn target_distance(targets: &[f64], weights: &[f64], norm: DeviationNorm, p: &[f64]) -> f64 {
    targets
        .iter()
        .zip(weights)
        .zip(p)
        .map(|((t, w), x)| match norm {
            DeviationNorm::Absolute => w * (t - x).abs(),
            DeviationNorm::Squared => w * (t - x).powi(2),
        })
        .sum()
}

/// Lexicographic comparison of dense vectors.
pub(crate) fn better(score: f64, dense: &[u32], best: Option<(f64, &[u32])>, tol: f64) -> bool {
    match best {
        None => true,
        Some((b, bd)) => score < b - tol || ((score - b).abs() <= tol && dense < bd),
    }
}

pub(crate) fn tolerance(best: f64) -> f64 {
    1e-9 * best.abs().max(1.0)
}
