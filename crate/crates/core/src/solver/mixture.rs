//! Binary mixture design: candidate enumeration per component, then a
//! one-dimensional search over the mole fraction for every pair.

use std::fmt;
use std::sync::Arc;

use super::enumerate::enumerate_feasible;
use super::evaluate::tolerance;
use super::problem::{DesignProblem, DesignSolution, DeviationNorm, Sense};
use super::SolverError;
use crate::descriptor::DescriptorVector;

/// `q = g(x, n, p)`
pub type MixFn = Arc<dyn Fn(&[f64], &[DescriptorVector], &[Vec<f64>]) -> Vec<f64> + Send + Sync>;
/// Objective on the mixture property vector q.
pub type QFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum MixingModel {
    /// q_j = Σ_i x_i p_ij
    IdealLinear,
    Custom(MixFn),
}

impl fmt::Debug for MixingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MixingModel::IdealLinear => "IdealLinear",
            MixingModel::Custom(_) => "Custom",
        })
    }
}

#[derive(Clone)]
pub enum MixtureObjective {
    Target { targets: Vec<f64>, weights: Vec<f64>, norm: DeviationNorm },
    Direct { sense: Sense, function: QFn },
}

impl fmt::Debug for MixtureObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixtureObjective::Target { targets, weights, norm } => {
                write!(f, "Target({targets:?}, {weights:?}, {norm:?})")
            }
            MixtureObjective::Direct { sense, .. } => write!(f, "Direct({sense:?})"),
        }
    }
}

impl MixtureObjective {
    /// Minimization score and the objective in the user's sense.
    fn eval(&self, q: &[f64]) -> (f64, f64) {
        match self {
            MixtureObjective::Target { targets, weights, norm } => {
                let v = super::evaluate::target_distance(targets, weights, *norm, q);
                (v, v)
            }
            MixtureObjective::Direct { sense, function } => {
                let v = function(q);
                match sense {
                    Sense::Minimize => (v, v),
                    Sense::Maximize => (-v, v),
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MixtureProblem {
    /// One base problem per component.
    pub components: Vec<DesignProblem>,
    pub mixing: MixingModel,
    /// Per mixture property (q_j^L, q_j^U).
    pub mixture_bounds: Vec<(f64, f64)>,
    pub objective: MixtureObjective,
    /// Pairs examined before giving up.
    pub max_pairs: u64,
}

impl MixtureProblem {
    pub fn new(components: Vec<DesignProblem>, objective: MixtureObjective) -> Self {
        let k = components.first().map_or(0, |c| c.models.len());
        Self {
            components,
            mixing: MixingModel::IdealLinear,
            mixture_bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); k],
            objective,
            max_pairs: 250_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MixtureSolution {
    pub components: Vec<DesignSolution>,
    /// Mole fractions, summing to 1.
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    pub objective: f64,
}

const X_TOLERANCE: f64 = 1e-6;
const GRID: usize = 100;
const BOUND_SLACK: f64 = 1e-9;

struct Pair<'a> {
    mp: &'a MixtureProblem,
    n: [DescriptorVector; 2],
    p: [Vec<f64>; 2],
}

impl Pair<'_> {
    fn q(&self, x: f64) -> Vec<f64> {
        match &self.mp.mixing {
            MixingModel::IdealLinear => self.p[0].iter().zip(&self.p[1]).map(|(a, b)| x * a + (1.0 - x) * b).collect(),
            MixingModel::Custom(g) => g(&[x, 1.0 - x], &self.n, &self.p),
        }
    }

    /// (score, objective, q), score infinite when q violates its bounds.
    fn eval(&self, x: f64) -> (f64, f64, Vec<f64>) {
        let q = self.q(x);
        let ok = q.len() == self.mp.mixture_bounds.len()
            && q.iter().zip(&self.mp.mixture_bounds).all(|(&v, &(lo, hi))| {
                let eps = BOUND_SLACK * v.abs().max(1.0);
                v >= lo - eps && v <= hi + eps
            });
        if !ok {
            return (f64::INFINITY, f64::INFINITY, q);
        }
        let (s, v) = self.mp.objective.eval(&q);
        (if s.is_nan() { f64::INFINITY } else { s }, v, q)
    }

    /// Points where an ideal-linear q_j crosses a bound or a target.
    fn breakpoints(&self) -> Vec<f64> {
        if !matches!(self.mp.mixing, MixingModel::IdealLinear) {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (j, (a, b)) in self.p[0].iter().zip(&self.p[1]).enumerate() {
            let slope = a - b;
            if slope == 0.0 {
                continue;
            }
            let mut levels = vec![];
            if let Some(&(lo, hi)) = self.mp.mixture_bounds.get(j) {
                levels.extend([lo, hi].into_iter().filter(|v| v.is_finite()));
            }
            if let MixtureObjective::Target { targets, .. } = &self.mp.objective {
                levels.extend(targets.get(j));
            }
            for level in levels {
                let x = (level - b) / slope;
                if (0.0..=1.0).contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    fn golden(&self, mut lo: f64, mut hi: f64) -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - r * (hi - lo);
        let mut d = lo + r * (hi - lo);
        let (mut fc, mut fd) = (self.eval(c).0, self.eval(d).0);
        while hi - lo > X_TOLERANCE {
            if fc <= fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - r * (hi - lo);
                fc = self.eval(c).0;
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + r * (hi - lo);
                fd = self.eval(d).0;
            }
        }
        (lo + hi) / 2.0
    }

    /// Best x on [0, 1]: grid prescan, breakpoints, then golden-section refinement.
    fn optimize(&self) -> Option<(f64, f64, f64, Vec<f64>)> {
        let mut xs: Vec<f64> = (0..=GRID).map(|i| i as f64 / GRID as f64).collect();
        xs.extend(self.breakpoints());
        let mut best: Option<(f64, f64, f64, Vec<f64>)> = None;
        let consider = |x: f64, best: &mut Option<(f64, f64, f64, Vec<f64>)>| {
            let (s, v, q) = self.eval(x);
            if s.is_finite() && best.as_ref().is_none_or(|b| s < b.0 - tolerance(b.0)) {
                *best = Some((s, x, v, q));
            }
        };
        for &x in &xs {
            consider(x, &mut best);
        }
        let g = best.as_ref()?.1;
        let step = 1.0 / GRID as f64;
        let x = self.golden((g - step).max(0.0), (g + step).min(1.0));
        consider(x, &mut best);
        best
    }
}

pub fn solve_mixture(mp: &MixtureProblem) -> Result<MixtureSolution, SolverError> {
    if mp.components.len() != 2 {
        return Err(SolverError::InvalidProblem("the mixture driver handles binary mixtures only".into()));
    }
    for (lo, hi) in &mp.mixture_bounds {
        if lo > hi {
            return Err(SolverError::InconsistentBounds(format!("mixture property: {lo} > {hi}")));
        }
    }
    if let MixtureObjective::Target { targets, weights, .. } = &mp.objective {
        if targets.len() != mp.mixture_bounds.len() || weights.len() != targets.len() {
            return Err(SolverError::InvalidProblem("one target and weight per mixture property".into()));
        }
    }
    let lists: Vec<Vec<DesignSolution>> = mp.components.iter().map(enumerate_feasible).collect::<Result<_, _>>()?;
    if lists.iter().any(|l| l.is_empty()) {
        return Err(SolverError::NoCandidates);
    }
    let pairs = lists[0].len() as u64 * lists[1].len() as u64;
    if pairs > mp.max_pairs {
        return Err(SolverError::SearchSpaceTooLarge { estimated: pairs, cap: mp.max_pairs });
    }
    let mut best: Option<(f64, usize, usize, f64, f64, Vec<f64>)> = None;
    for (i, a) in lists[0].iter().enumerate() {
        for (j, b) in lists[1].iter().enumerate() {
            if a.n == b.n {
                continue;
            }
            let pair = Pair { mp, n: [a.n.clone(), b.n.clone()], p: [a.p.clone(), b.p.clone()] };
            let Some((s, x, v, q)) = pair.optimize() else {
                continue;
            };
            if best.as_ref().is_none_or(|b| s < b.0 - tolerance(b.0)) {
                best = Some((s, i, j, x, v, q));
            }
        }
    }
    let (_, i, j, x, objective, q) = best.ok_or(SolverError::Infeasible { stage: None })?;
    Ok(MixtureSolution { components: vec![lists[0][i].clone(), lists[1][j].clone()], x: vec![x, 1.0 - x], q, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gc::GcModel;
    use crate::graph::{Group, GroupLibrary};
    use crate::solver::StructureCheck;

    fn fixed(name: &str, c: f64) -> DesignProblem {
        let lib = GroupLibrary::new(vec![Group::simple(name, 0)]).unwrap();
        let mut p = DesignProblem::gc(lib, vec![GcModel::linear("P", [(name, c)])], 1);
        p.structure = StructureCheck::None;
        p.total_bounds = (1, 1);
        p
    }

    fn target(t: f64) -> MixtureObjective {
        MixtureObjective::Target { targets: vec![t], weights: vec![1.0], norm: DeviationNorm::Absolute }
    }

    #[test]
    fn interpolates_target() {
        let mp = MixtureProblem::new(vec![fixed("A", 2.0), fixed("B", 5.0)], target(3.1));
        let s = solve_mixture(&mp).unwrap();
        let x = (3.1 - 5.0) / (2.0 - 5.0);
        assert!((s.x[0] - x).abs() < 1e-12);
        assert!(s.objective.abs() < 1e-12);
        assert!((s.x[0] + s.x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_component() {
        let mp = MixtureProblem::new(vec![fixed("A", 2.0), fixed("B", 5.0)], target(2.0));
        let s = solve_mixture(&mp).unwrap();
        assert_eq!(s.x[0], 1.0);
    }

    #[test]
    fn bounds_restrict_fraction() {
        let mut mp = MixtureProblem::new(vec![fixed("A", 2.0), fixed("B", 5.0)], target(2.0));
        mp.mixture_bounds = vec![(3.5, 10.0)];
        let s = solve_mixture(&mp).unwrap();
        assert!((s.q[0] - 3.5).abs() < 1e-9);
        assert!((s.objective - 1.5).abs() < 1e-9);
    }

    #[test]
    fn no_candidates() {
        let mut a = fixed("A", 2.0);
        a.property_bounds = vec![(10.0, 11.0)];
        let mp = MixtureProblem::new(vec![a, fixed("B", 5.0)], target(2.0));
        assert!(matches!(solve_mixture(&mp), Err(SolverError::NoCandidates)));
    }
}
