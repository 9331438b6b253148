use std::sync::Arc;

use camd_core::feasibility::check_gc_basic;
use camd_core::gc::{estimate_gc, GcModel};
use camd_core::graph::{Group, GroupLibrary};
use camd_core::solver::{
    enumerate_feasible, ga_solve, sa_solve, solve_exact, solve_process, tabu_solve, BnbOptions, DesignProblem,
    DesignSolution, DeviationNorm, GaParams, Objective, ProcessProblem, SaParams, SolverError, TabuParams,
};
use proptest::prelude::*;

fn problem() -> impl Strategy<Value = DesignProblem> {
    (2usize..=5)
        .prop_flat_map(|k| {
            (
                proptest::collection::vec(1u32..=4, k),
                proptest::collection::vec(-5.0f64..5.0, k),
                -8.0f64..8.0,
                2u32..=6,
                proptest::bool::ANY,
            )
        })
        .prop_map(|(mut phis, coefs, target, nu, squared)| {
            phis[0] = 1;
            let groups: Vec<Group> = phis.iter().enumerate().map(|(i, &p)| Group::simple(&format!("G{i}"), p)).collect();
            let lib = GroupLibrary::new(groups).unwrap();
            let model = GcModel::linear("P", lib.names().into_iter().zip(coefs));
            let norm = if squared { DeviationNorm::Squared } else { DeviationNorm::Absolute };
            DesignProblem::gc(lib, vec![model], nu).with_objective(Objective::Target {
                targets: vec![target],
                weights: vec![1.0],
                norm,
            })
        })
}

fn revalidate(problem: &DesignProblem, s: &DesignSolution) -> Result<(), TestCaseError> {
    let lib = problem.structure.library().unwrap();
    prop_assert!((-1..=1).any(|m| check_gc_basic(&s.n, lib, m).unwrap().ok()), "{}", s.n);
    let total = s.n.total() as u32;
    prop_assert!(total >= problem.total_bounds.0 && total <= problem.total_bounds.1);
    for (m, p) in problem.models.iter().zip(&s.p) {
        prop_assert!((estimate_gc(m, &s.n).unwrap() - p).abs() <= 1e-12);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_solutions_revalidate_and_match_enumeration(p in problem()) {
        match solve_exact(&p, &BnbOptions::default()) {
            Ok(s) => {
                revalidate(&p, &s)?;
                let best = enumerate_feasible(&p).unwrap().iter().map(|e| e.objective).fold(f64::INFINITY, f64::min);
                prop_assert!((s.objective - best).abs() <= 1e-9 * best.abs().max(1.0));
            }
            Err(SolverError::Infeasible { .. }) => prop_assert!(enumerate_feasible(&p).unwrap().is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn deviations_are_complementary(p in problem()) {
        let Ok(s) = solve_exact(&p, &BnbOptions::default()) else { return Ok(()) };
        let Objective::Target { targets, .. } = &p.objective else { unreachable!() };
        for ((d, t), x) in s.deviations.iter().zip(targets).zip(&s.p) {
            prop_assert!((d.plus - d.minus - (t - x)).abs() <= 1e-12);
            prop_assert_eq!(d.plus * d.minus, 0.0);
            prop_assert!(d.plus >= 0.0 && d.minus >= 0.0);
        }
    }

    #[test]
    fn heuristics_are_feasible_and_seeded(p in problem(), seed in any::<u64>()) {
        let ga = GaParams { seed, generations: 30, ..Default::default() };
        let tabu = TabuParams { seed, iterations: 100, ..Default::default() };
        let sa = SaParams { seed, steps: 1500, ..Default::default() };
        let runs = [
            (ga_solve(&p, &ga), ga_solve(&p, &ga)),
            (tabu_solve(&p, &tabu), tabu_solve(&p, &tabu)),
            (sa_solve(&p, &sa), sa_solve(&p, &sa)),
        ];
        for (a, b) in runs {
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    revalidate(&p, &a)?;
                    prop_assert_eq!(&a.n, &b.n);
                    prop_assert_eq!(a.objective, b.objective);
                }
                (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
                (a, b) => return Err(TestCaseError::fail(format!("runs differ: {:?} / {:?}", a.is_ok(), b.is_ok()))),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn process_relaxation_bounds_the_final_cost(
        p in problem(),
        centre in -6.0f64..6.0,
        a in 0.1f64..2.0,
        b in -1.0f64..1.0,
        r in 0.01f64..1.0,
    ) {
        let cost = Arc::new(move |q: &[f64], mu: &[f64]| (q[0] - centre).powi(2) + a * (mu[0] - b * q[0]).powi(2) + r * mu[0] * mu[0]);
        let mut feas = p.clone();
        feas.objective = Objective::Feasibility;
        let pp = ProcessProblem::new(cost, vec![(-10.0, 10.0)]);
        match solve_process(&feas, &pp) {
            Ok(s) => {
                prop_assert!(s.relaxation_bound <= s.objective + 1e-12);
                revalidate(&feas, &s.solution)?;
            }
            Err(SolverError::Infeasible { .. }) => prop_assert!(enumerate_feasible(&feas).unwrap().is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}
