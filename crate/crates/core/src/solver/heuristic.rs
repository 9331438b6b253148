//! Genetic algorithm, tabu search and simulated annealing over the integer vector n.

use std::collections::{HashMap, VecDeque};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::evaluate::{better, tolerance, validate, Evaluation, Evaluator};
use super::problem::*;
use super::SolverError;

#[derive(Debug, Clone)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-gene probability of a ±1 step.
    pub mutation_rate: f64,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self { population: 40, generations: 120, crossover_rate: 0.9, mutation_rate: 0.2, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct TabuParams {
    pub tenure: usize,
    pub iterations: usize,
    /// Neighbors evaluated per iteration; larger neighborhoods are sampled.
    pub neighborhood_cap: usize,
    /// Iterations without improvement before a random restart.
    pub stagnation: usize,
    pub seed: u64,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self { tenure: 7, iterations: 400, neighborhood_cap: 64, stagnation: 40, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SaParams {
    /// Initial temperature; estimated from random feasible samples when `None`.
    pub t0: Option<f64>,
    pub alpha: f64,
    pub steps: usize,
    /// Moves between cooling steps.
    pub steps_per_temperature: usize,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self { t0: None, alpha: 0.95, steps: 6000, steps_per_temperature: 25, seed: 0 }
    }
}

const START_ATTEMPTS: usize = 500;
const T0_SAMPLES: usize = 100;

struct Search<'a> {
    ev: Evaluator<'a>,
    cache: HashMap<Vec<u32>, Option<Evaluation>>,
    rng: ChaCha8Rng,
    /// Per-descriptor Φ when the structural check is the basic one.
    valences: Option<Vec<u32>>,
    best: Option<(Vec<u32>, Evaluation)>,
}

impl<'a> Search<'a> {
    fn new(problem: &'a DesignProblem, seed: u64) -> Self {
        let valences = match &problem.structure {
            StructureCheck::GcBasic { library, .. } => {
                Some(problem.descriptors.iter().map(|d| library.get(d).map_or(0, |g| g.phi())).collect())
            }
            _ => None,
        };
        Self {
            ev: Evaluator::new(problem),
            cache: HashMap::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            valences,
            best: None,
        }
    }

    fn boxes(&self) -> &[(u32, u32)] {
        self.ev.boxes()
    }

    fn totals(&self) -> (u32, u32) {
        let (nl, nu) = self.ev.problem.total_bounds;
        (nl.max(1), nu)
    }

    /// Minimization score, `None` if infeasible.
    fn score(&mut self, x: &[u32]) -> Option<f64> {
        if let Some(e) = self.cache.get(x) {
            return e.as_ref().map(|e| e.score);
        }
        let e = self.ev.evaluate(x);
        if let Some(e) = &e {
            let cur = self.best.as_ref().map(|(d, b)| (b.score, d.as_slice()));
            let tol = cur.map_or(0.0, |(s, _)| tolerance(s));
            if better(e.score, x, cur, tol) {
                self.best = Some((x.to_vec(), e.clone()));
            }
        }
        let s = e.as_ref().map(|e| e.score);
        self.cache.insert(x.to_vec(), e);
        s
    }

    /// Moves the total into range by random unit steps.
    fn fix_total(&mut self, x: &mut [u32]) {
        let (nl, nu) = self.totals();
        let boxes = self.boxes().to_vec();
        for (v, &(lo, hi)) in x.iter_mut().zip(&boxes) {
            *v = (*v).clamp(lo, hi);
        }
        loop {
            let total: u32 = x.iter().sum();
            let idx: Vec<usize> = if total > nu {
                (0..x.len()).filter(|&i| x[i] > boxes[i].0).collect()
            } else if total < nl {
                (0..x.len()).filter(|&i| x[i] < boxes[i].1).collect()
            } else {
                return;
            };
            let Some(&i) = idx.choose(&mut self.rng) else {
                return;
            };
            if total > nu {
                x[i] -= 1;
            } else {
                x[i] += 1;
            }
        }
    }

    fn random_point(&mut self) -> Vec<u32> {
        let boxes = self.boxes().to_vec();
        let (_, nu) = self.totals();
        // Sample totals evenly rather than letting the box dominate.
        let cap = self.rng.random_range(0..=nu);
        let mut x: Vec<u32> = boxes.iter().map(|&(lo, hi)| self.rng.random_range(lo..=hi.min(lo.max(cap)))).collect();
        self.fix_total(&mut x);
        x
    }

    /// Greedy addition or removal of monovalent groups toward a valence balance,
    /// `None` if no feasible point is reached.
    fn repair(&mut self, mut x: Vec<u32>) -> Option<Vec<u32>> {
        self.fix_total(&mut x);
        let Some(phi) = self.valences.clone() else {
            return self.score(&x).map(|_| x);
        };
        let boxes = self.boxes().to_vec();
        let (nl, nu) = self.totals();
        let monovalent: Vec<usize> = (0..x.len()).filter(|&i| phi[i] == 1).collect();
        for _ in 0..=2 * nu as usize + 2 {
            if self.score(&x).is_some() {
                return Some(x);
            }
            // Σ (Φ − 2) n must be 2m for m in {−1, 0, 1}.
            let s: i64 = x.iter().zip(&phi).map(|(&n, &p)| (i64::from(p) - 2) * i64::from(n)).sum();
            let total: u32 = x.iter().sum();
            let can_add = monovalent.iter().any(|&i| x[i] < boxes[i].1) && total < nu;
            let add = if s > 2 {
                true
            } else if s < -2 {
                false
            } else if s % 2 != 0 {
                can_add
            } else {
                return None;
            };
            let cands: Vec<usize> = if add {
                monovalent.iter().copied().filter(|&i| x[i] < boxes[i].1 && total < nu).collect()
            } else {
                monovalent.iter().copied().filter(|&i| x[i] > boxes[i].0 && total > nl).collect()
            };
            let &i = cands.choose(&mut self.rng)?;
            if add {
                x[i] += 1;
            } else {
                x[i] -= 1;
            }
        }
        None
    }

    fn random_feasible(&mut self) -> Option<Vec<u32>> {
        (0..START_ATTEMPTS).find_map(|_| {
            let x = self.random_point();
            self.repair(x)
        })
    }

    /// Add one, remove one, or move one unit between two descriptors.
    fn neighbors(&self, x: &[u32]) -> Vec<Vec<u32>> {
        let boxes = self.boxes();
        let (nl, nu) = self.totals();
        let total: u32 = x.iter().sum();
        let mut out = Vec::new();
        for i in 0..x.len() {
            if x[i] < boxes[i].1 && total < nu {
                let mut y = x.to_vec();
                y[i] += 1;
                out.push(y);
            }
            if x[i] > boxes[i].0 && total > nl {
                let mut y = x.to_vec();
                y[i] -= 1;
                out.push(y);
            }
            for j in 0..x.len() {
                if i != j && x[i] > boxes[i].0 && x[j] < boxes[j].1 {
                    let mut y = x.to_vec();
                    y[i] -= 1;
                    y[j] += 1;
                    out.push(y);
                }
            }
        }
        out
    }

    fn finish(self, missing: SolverError) -> Result<DesignSolution, SolverError> {
        let (x, e) = self.best.ok_or(missing)?;
        Ok(self.ev.solution(&x, e, Optimality::Heuristic))
    }
}

/// Orders candidates by score, then lexicographically; infeasible last.
fn rank(a: (Option<f64>, &[u32]), b: (Option<f64>, &[u32])) -> std::cmp::Ordering {
    let key = |s: Option<f64>| s.unwrap_or(f64::INFINITY);
    key(a.0).total_cmp(&key(b.0)).then_with(|| a.1.cmp(b.1))
}

pub fn ga_solve(problem: &DesignProblem, params: &GaParams) -> Result<DesignSolution, SolverError> {
    validate(problem)?;
    if params.population == 0 {
        return Err(SolverError::InvalidProblem("population must be positive".into()));
    }
    if !(0.0..=1.0).contains(&params.crossover_rate) || !(0.0..=1.0).contains(&params.mutation_rate) {
        return Err(SolverError::InvalidProblem("rates must lie in [0, 1]".into()));
    }
    let mut s = Search::new(problem, params.seed);
    let d = problem.descriptors.len();
    let mut pop: Vec<(Vec<u32>, Option<f64>)> = (0..params.population)
        .map(|_| {
            let x = s.random_feasible().unwrap_or_else(|| s.random_point());
            let f = s.score(&x);
            (x, f)
        })
        .collect();
    for _ in 0..params.generations {
        let elite = pop.iter().min_by(|a, b| rank((a.1, &a.0), (b.1, &b.0))).cloned().expect("non-empty population");
        let mut next = vec![elite];
        while next.len() < params.population {
            let pick = |s: &mut Search<'_>| {
                let a = &pop[s.rng.random_range(0..pop.len())];
                let b = &pop[s.rng.random_range(0..pop.len())];
                if rank((a.1, &a.0), (b.1, &b.0)).is_le() {
                    a.0.clone()
                } else {
                    b.0.clone()
                }
            };
            let p1 = pick(&mut s);
            let p2 = pick(&mut s);
            let mut child = if d > 1 && s.rng.random::<f64>() < params.crossover_rate {
                let cut = s.rng.random_range(1..d);
                p1[..cut].iter().chain(&p2[cut..]).copied().collect()
            } else {
                p1
            };
            let boxes = s.boxes().to_vec();
            for (v, &(lo, hi)) in child.iter_mut().zip(&boxes) {
                if s.rng.random::<f64>() < params.mutation_rate {
                    *v = if s.rng.random::<bool>() { (*v + 1).min(hi) } else { v.saturating_sub(1).max(lo) };
                }
            }
            let x = s.repair(child.clone()).unwrap_or(child);
            let f = s.score(&x);
            next.push((x, f));
        }
        pop = next;
    }
    s.finish(SolverError::NoFeasibleIndividual)
}

pub fn tabu_solve(problem: &DesignProblem, params: &TabuParams) -> Result<DesignSolution, SolverError> {
    validate(problem)?;
    if params.tenure == 0 || params.neighborhood_cap == 0 {
        return Err(SolverError::InvalidProblem("tenure and neighborhood cap must be positive".into()));
    }
    let mut s = Search::new(problem, params.seed);
    let mut cur = s.random_feasible().ok_or(SolverError::NoFeasibleStart)?;
    let mut tabu: VecDeque<Vec<u32>> = VecDeque::new();
    let mut since_improvement = 0;
    for _ in 0..params.iterations {
        let incumbent = s.best.as_ref().map(|(_, e)| e.score).unwrap_or(f64::INFINITY);
        let before = incumbent;
        let mut moves = s.neighbors(&cur);
        moves.shuffle(&mut s.rng);
        moves.truncate(params.neighborhood_cap);
        let mut chosen: Option<(f64, Vec<u32>)> = None;
        for y in moves {
            let Some(f) = s.score(&y) else {
                continue;
            };
            let aspiration = f < incumbent - tolerance(incumbent);
            if tabu.contains(&y) && !aspiration {
                continue;
            }
            if chosen.as_ref().is_none_or(|(cf, cy)| rank((Some(f), &y), (Some(*cf), cy)).is_lt()) {
                chosen = Some((f, y));
            }
        }
        let improved = s.best.as_ref().is_some_and(|(_, e)| e.score < before - tolerance(before));
        since_improvement = if improved { 0 } else { since_improvement + 1 };
        match chosen {
            Some((_, y)) if since_improvement < params.stagnation => {
                tabu.push_back(std::mem::replace(&mut cur, y));
                while tabu.len() > params.tenure {
                    tabu.pop_front();
                }
            }
            _ => {
                since_improvement = 0;
                tabu.clear();
                if let Some(x) = s.random_feasible() {
                    cur = x;
                }
            }
        }
    }
    s.finish(SolverError::NoFeasibleStart)
}

pub fn sa_solve(problem: &DesignProblem, params: &SaParams) -> Result<DesignSolution, SolverError> {
    anneal(problem, params, |_| {})
}

/// Annealing loop; `on_move` sees the score of every accepted state.
fn anneal(
    problem: &DesignProblem,
    params: &SaParams,
    mut on_move: impl FnMut(f64),
) -> Result<DesignSolution, SolverError> {
    validate(problem)?;
    if !(params.alpha > 0.0 && params.alpha < 1.0) || params.t0.is_some_and(|t| !(t > 0.0)) {
        return Err(SolverError::InvalidProblem("need 0 < alpha < 1 and T0 > 0".into()));
    }
    let mut s = Search::new(problem, params.seed);
    let mut cur = s.random_feasible().ok_or(SolverError::NoFeasibleStart)?;
    let mut f_cur = s.score(&cur).expect("start is feasible");
    let mut t = match params.t0 {
        Some(t) => t,
        None => {
            let mut lo = f_cur;
            let mut hi = f_cur;
            for _ in 0..T0_SAMPLES {
                let x = s.random_point();
                if let Some(f) = s.repair(x).and_then(|x| s.score(&x)) {
                    lo = lo.min(f);
                    hi = hi.max(f);
                }
            }
            if hi - lo > 0.0 {
                hi - lo
            } else {
                1.0
            }
        }
    };
    let per = params.steps_per_temperature.max(1);
    for step in 0..params.steps {
        let moves = s.neighbors(&cur);
        if let Some(y) = moves.choose(&mut s.rng).cloned() {
            if let Some(f) = s.score(&y) {
                let delta = f - f_cur;
                let u: f64 = s.rng.random();
                if delta <= 0.0 || u < (-delta / t).exp() {
                    cur = y;
                    f_cur = f;
                    on_move(f);
                }
            }
        }
        if (step + 1) % per == 0 {
            t *= params.alpha;
        }
    }
    s.finish(SolverError::NoFeasibleStart)
}
