//! Exhaustive generate-and-test over the descriptor box.

use super::evaluate::{better, tolerance, validate, Evaluation, Evaluator};
use super::problem::{DesignProblem, DesignSolution, Optimality};
use super::SolverError;

pub const DEFAULT_ENUMERATION_CAP: u64 = 2_000_000;

/// Number of box points whose total lies within the total bounds.
pub fn search_space_size(problem: &DesignProblem) -> u64 {
    let (nl, nu) = problem.total_bounds;
    let nu = nu as usize;
    let mut ways = vec![0u128; nu + 1];
    ways[0] = 1;
    for (lo, hi) in problem.boxes() {
        let mut next = vec![0u128; nu + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for v in lo..=hi {
                let t = s + v as usize;
                if t > nu {
                    break;
                }
                next[t] = next[t].saturating_add(w);
            }
        }
        ways = next;
    }
    let total: u128 = ways.iter().skip(nl as usize).fold(0u128, |a, &b| a.saturating_add(b));
    u64::try_from(total).unwrap_or(u64::MAX)
}

/// Visits every box point in lexicographic order.
pub(crate) fn for_each_point(boxes: &[(u32, u32)], total: (u32, u32), mut visit: impl FnMut(&[u32])) {
    let mut suffix_hi = vec![0u32; boxes.len() + 1];
    for i in (0..boxes.len()).rev() {
        suffix_hi[i] = suffix_hi[i + 1].saturating_add(boxes[i].1);
    }
    let suffix_lo: Vec<u32> = {
        let mut s = vec![0u32; boxes.len() + 1];
        for i in (0..boxes.len()).rev() {
            s[i] = s[i + 1] + boxes[i].0;
        }
        s
    };
    let mut cur = vec![0u32; boxes.len()];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        sum: u32,
        boxes: &[(u32, u32)],
        total: (u32, u32),
        suffix_lo: &[u32],
        suffix_hi: &[u32],
        cur: &mut Vec<u32>,
        visit: &mut dyn FnMut(&[u32]),
    ) {
        if i == boxes.len() {
            if sum >= total.0 && sum <= total.1 {
                visit(cur);
            }
            return;
        }
        for v in boxes[i].0..=boxes[i].1 {
            let s = sum + v;
            if s + suffix_lo[i + 1] > total.1 {
                break;
            }
            if s.saturating_add(suffix_hi[i + 1]) < total.0 {
                continue;
            }
            cur[i] = v;
            rec(i + 1, s, boxes, total, suffix_lo, suffix_hi, cur, visit);
        }
        cur[i] = boxes[i].0;
    }
    rec(0, 0, boxes, total, &suffix_lo, &suffix_hi, &mut cur, &mut visit);
}

fn check_size(problem: &DesignProblem, cap: u64) -> Result<(), SolverError> {
    let size = search_space_size(problem);
    if size > cap {
        return Err(SolverError::SearchSpaceTooLarge { estimated: size, cap });
    }
    Ok(())
}

/// Every feasible n in lexicographic order of the descriptor index.
pub fn enumerate_feasible(problem: &DesignProblem) -> Result<Vec<DesignSolution>, SolverError> {
    enumerate_feasible_capped(problem, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_feasible_capped(problem: &DesignProblem, cap: u64) -> Result<Vec<DesignSolution>, SolverError> {
    validate(problem)?;
    check_size(problem, cap)?;
    let ev = Evaluator::new(problem);
    let mut out = Vec::new();
    for_each_point(ev.boxes(), problem.total_bounds, |x| {
        if let Some(e) = ev.evaluate(x) {
            out.push(ev.solution(x, e, Optimality::Enumerated));
        }
    });
    Ok(out)
}

/// Best feasible point by exhaustive scan; ties go to the lexicographically smallest n.
pub(crate) fn scan_best(problem: &DesignProblem, cap: u64) -> Result<(Vec<u32>, Evaluation), SolverError> {
    check_size(problem, cap)?;
    let ev = Evaluator::new(problem);
    let mut best: Option<(Vec<u32>, Evaluation)> = None;
    for_each_point(ev.boxes(), problem.total_bounds, |x| {
        if let Some(e) = ev.evaluate(x) {
            let cur = best.as_ref().map(|(d, b)| (b.score, d.as_slice()));
            let tol = cur.map_or(0.0, |(s, _)| tolerance(s));
            if better(e.score, x, cur, tol) {
                best = Some((x.to_vec(), e));
            }
        }
    });
    best.ok_or(SolverError::Infeasible { stage: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::DescriptorVector;
    use crate::graph::{Group, GroupLibrary};

    fn fig8() -> GroupLibrary {
        GroupLibrary::new(vec![
            Group::simple("NH", 2),
            Group::simple("CH", 3),
            Group::simple("CH3", 1),
            Group::simple("Br", 1),
        ])
        .unwrap()
    }

    #[test]
    fn includes_worked_vector() {
        let p = DesignProblem::gc(fig8(), vec![], 5);
        let all = enumerate_feasible(&p).unwrap();
        let target = DescriptorVector::from_pairs([("NH", 1), ("CH", 1), ("CH3", 2), ("Br", 1)]);
        assert!(all.iter().any(|s| s.n == target));
        let dense: Vec<Vec<u32>> = all.iter().map(|s| p.to_dense(&s.n)).collect();
        let mut sorted = dense.clone();
        sorted.sort();
        assert_eq!(dense, sorted);
    }

    #[test]
    fn single_methyl_library() {
        let lib = GroupLibrary::new(vec![Group::simple("CH3", 1)]).unwrap();
        let p = DesignProblem::gc(lib, vec![], 2);
        let all = enumerate_feasible(&p).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].n, DescriptorVector::from_pairs([("CH3", 2)]));
    }

    #[test]
    fn space_size_matches_loop() {
        let mut p = DesignProblem::gc(fig8(), vec![], 5);
        p.descriptor_bounds.insert("CH".into(), (0, 2));
        let mut count = 0u64;
        for_each_point(&p.boxes(), p.total_bounds, |_| count += 1);
        assert_eq!(search_space_size(&p), count);
        assert!(matches!(enumerate_feasible_capped(&p, 3), Err(SolverError::SearchSpaceTooLarge { .. })));
    }
}
