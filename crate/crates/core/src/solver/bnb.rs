//! Best-first branch and bound with interval bounds on linear property models.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::enumerate::{scan_best, search_space_size, DEFAULT_ENUMERATION_CAP};
use super::evaluate::{better, tolerance, validate, Evaluation, Evaluator};
use super::problem::*;
use super::SolverError;

#[derive(Debug, Clone)]
pub struct BnbOptions {
    /// Nodes expanded before giving up on a proof.
    pub node_cap: usize,
    /// Cap for the enumeration fallback.
    pub enumeration_cap: u64,
    /// Skip branch and bound and scan the whole box.
    pub force_enumeration: bool,
}

impl Default for BnbOptions {
    fn default() -> Self {
        Self { node_cap: 5_000_000, enumeration_cap: DEFAULT_ENUMERATION_CAP, force_enumeration: false }
    }
}

/// Minimizes the weighted target deviation.
pub fn solve_target(problem: &DesignProblem) -> Result<DesignSolution, SolverError> {
    if !matches!(problem.objective, Objective::Target { .. }) {
        return Err(SolverError::InvalidProblem("solve_target needs a target objective".into()));
    }
    solve_exact(problem, &BnbOptions::default())
}

/// Minimizes or maximizes a direct objective.
pub fn solve_direct(problem: &DesignProblem) -> Result<DesignSolution, SolverError> {
    if !matches!(problem.objective, Objective::Direct { .. }) {
        return Err(SolverError::InvalidProblem("solve_direct needs a direct objective".into()));
    }
    solve_exact(problem, &BnbOptions::default())
}

/// Exact solve under any objective. Uses branch and bound when every model is
/// affine and the objective can be bounded over a property box, otherwise an
/// exhaustive scan.
pub fn solve_exact(problem: &DesignProblem, opts: &BnbOptions) -> Result<DesignSolution, SolverError> {
    validate(problem)?;
    let ev = Evaluator::new(problem);
    let forms = ev.linear_forms();
    let boundable = match &problem.objective {
        Objective::Feasibility => false,
        Objective::Direct { function: DirectFn::Custom { bound, .. }, .. } => bound.is_some(),
        _ => true,
    };
    match forms {
        Some(forms) if boundable && !opts.force_enumeration => branch_and_bound(&ev, &forms, opts),
        _ => {
            let (x, e) = scan_best(problem, opts.enumeration_cap)?;
            Ok(ev.solution(&x, e, Optimality::Enumerated))
        }
    }
}

fn dist(t: f64, (lo, hi): (f64, f64)) -> f64 {
    if t < lo {
        lo - t
    } else if t > hi {
        t - hi
    } else {
        0.0
    }
}

/// Lower bound on the minimization score over a property box.
fn score_bound(objective: &Objective, props: &[(f64, f64)]) -> f64 {
    match objective {
        Objective::Feasibility => 0.0,
        Objective::Target { targets, weights, norm } => targets
            .iter()
            .zip(weights)
            .zip(props)
            .map(|((&t, &w), &b)| match norm {
                DeviationNorm::Absolute => w * dist(t, b),
                DeviationNorm::Squared => w * dist(t, b).powi(2),
            })
            .sum(),
        Objective::Direct { sense, function } => {
            let min = *sense == Sense::Minimize;
            match function {
                DirectFn::Property(k) => {
                    if min {
                        props[*k].0
                    } else {
                        -props[*k].1
                    }
                }
                DirectFn::Linear { coefficients, constant } => {
                    let (lo, hi) = coefficients.iter().zip(props).fold((*constant, *constant), |(lo, hi), (&c, &(a, b))| {
                        (lo + (c * a).min(c * b), hi + (c * a).max(c * b))
                    });
                    if min {
                        lo
                    } else {
                        -hi
                    }
                }
                DirectFn::SquaredDistance { targets, weights } => {
                    let terms = targets.iter().zip(weights).zip(props);
                    if min {
                        terms.map(|((&t, &w), &b)| w * dist(t, b).powi(2)).sum()
                    } else {
                        -terms.map(|((&t, &w), &(a, b))| w * (a - t).powi(2).max((b - t).powi(2))).sum::<f64>()
                    }
                }
                DirectFn::Custom { bound, .. } => {
                    let v = bound.as_ref().map_or(f64::NEG_INFINITY, |f| f(props));
                    if min {
                        v
                    } else {
                        -v
                    }
                }
            }
        }
    }
}

/// Per-descriptor branching weight Σ_k w_k |c_kd|.
fn branching_weights(objective: &Objective, forms: &[(Vec<f64>, f64)], d: usize) -> Vec<f64> {
    let k = forms.len();
    let w: Vec<f64> = match objective {
        Objective::Target { weights, .. } => weights.clone(),
        Objective::Direct { function, .. } => match function {
            DirectFn::Property(i) => (0..k).map(|j| if j == *i { 1.0 } else { 0.0 }).collect(),
            DirectFn::Linear { coefficients, .. } => coefficients.iter().map(|c| c.abs()).collect(),
            DirectFn::SquaredDistance { weights, .. } => weights.clone(),
            DirectFn::Custom { .. } => vec![1.0; k],
        },
        Objective::Feasibility => vec![1.0; k],
    };
    (0..d).map(|i| forms.iter().zip(&w).map(|((c, _), wk)| wk * c[i].abs()).sum()).collect()
}

struct Node {
    values: Vec<u32>,
    sum: u32,
    partial: Vec<f64>,
}

#[derive(PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    // Reversed so the max-heap pops the smallest bound, then the oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn branch_and_bound(
    ev: &Evaluator<'_>,
    forms: &[(Vec<f64>, f64)],
    opts: &BnbOptions,
) -> Result<DesignSolution, SolverError> {
    let problem = ev.problem;
    let d = problem.descriptors.len();
    let boxes = ev.boxes().to_vec();
    let weights = branching_weights(&problem.objective, forms, d);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let (nl, nu) = problem.total_bounds;
    let nl = nl.max(1);

    // Bound on the subtree below a node, or None if it is provably empty.
    let bound = |node: &Node| -> Option<f64> {
        let depth = node.values.len();
        let rest = &order[depth..];
        let lo_sum: u32 = rest.iter().map(|&i| boxes[i].0).sum();
        if node.sum + lo_sum > nu {
            return None;
        }
        let slack = nu - node.sum - lo_sum;
        let his: Vec<u32> = rest.iter().map(|&i| boxes[i].1.min(boxes[i].0 + slack)).collect();
        let hi_sum: u32 = his.iter().sum();
        if node.sum + hi_sum < nl {
            return None;
        }
        let mut props = Vec::with_capacity(forms.len());
        for (k, (c, b)) in forms.iter().enumerate() {
            let (mut lo, mut hi) = (node.partial[k] + b, node.partial[k] + b);
            for (j, &i) in rest.iter().enumerate() {
                let (x, y) = (c[i] * f64::from(boxes[i].0), c[i] * f64::from(his[j]));
                lo += x.min(y);
                hi += x.max(y);
            }
            let (pl, pu) = problem.property_bounds[k];
            let eps = 1e-9 * (lo.abs().max(hi.abs())).max(1.0);
            if hi < pl - eps || lo > pu + eps {
                return None;
            }
            props.push((lo - eps, hi + eps));
        }
        Some(score_bound(&problem.objective, &props))
    };

    let mut heap = BinaryHeap::new();
    let mut nodes: Vec<Option<Node>> = Vec::new();
    let root = Node { values: Vec::new(), sum: 0, partial: vec![0.0; forms.len()] };
    if let Some(lb) = bound(&root) {
        heap.push(Key(lb, 0));
        nodes.push(Some(root));
    }
    let mut best: Option<(Vec<u32>, Evaluation)> = None;
    let mut expanded = 0usize;
    while let Some(Key(lb, id)) = heap.pop() {
        if let Some((_, b)) = &best {
            if lb > b.score + tolerance(b.score) {
                break;
            }
        }
        expanded += 1;
        if expanded > opts.node_cap {
            return match best {
                Some((x, e)) => Ok(ev.solution(&x, e, Optimality::Heuristic)),
                None => Err(SolverError::SearchSpaceTooLarge { estimated: search_space_size(problem), cap: opts.node_cap as u64 }),
            };
        }
        let node = nodes[id].take().expect("node expanded once");
        let depth = node.values.len();
        if depth == d {
            let mut dense = vec![0u32; d];
            for (j, &i) in order.iter().enumerate() {
                dense[i] = node.values[j];
            }
            if let Some(e) = ev.evaluate(&dense) {
                let cur = best.as_ref().map(|(x, b)| (b.score, x.as_slice()));
                let tol = cur.map_or(0.0, |(s, _)| tolerance(s));
                if better(e.score, &dense, cur, tol) {
                    best = Some((dense, e));
                }
            }
            continue;
        }
        let i = order[depth];
        for v in boxes[i].0..=boxes[i].1 {
            if node.sum + v > nu {
                break;
            }
            let mut values = node.values.clone();
            values.push(v);
            let partial = node.partial.iter().zip(forms).map(|(p, (c, _))| p + c[i] * f64::from(v)).collect();
            let child = Node { values, sum: node.sum + v, partial };
            let Some(clb) = bound(&child) else {
                continue;
            };
            if let Some((_, b)) = &best {
                if clb > b.score + tolerance(b.score) {
                    continue;
                }
            }
            heap.push(Key(clb, nodes.len()));
            nodes.push(Some(child));
        }
    }
    let (x, e) = best.ok_or(SolverError::Infeasible { stage: None })?;
    Ok(ev.solution(&x, e, Optimality::Proven))
}
