mod common;

use camd_core::descriptor::DescriptorVector;
use camd_core::feasibility::{
    assemble_structures, check_gc_basic, check_sd_feasibility, check_ti_feasibility, SdConstraintData, TiAssignment,
};
use camd_core::fixtures;
use camd_core::graph::{decompose_into_groups, BondType, RingCounts};
use camd_core::sd::{color_graph, signature_counts, ColoringScheme};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn assembled_structures_pass_the_group_check(
        lib_pick in 0usize..2,
        counts in proptest::collection::vec(0u32..4, 6),
    ) {
        let lib = fixtures::library(["alkanes.lib", "oxygenates.lib"][lib_pick]).unwrap();
        let n: DescriptorVector = lib.names().into_iter().zip(counts).collect();
        prop_assume!(n.total() >= 2);
        let Ok(a) = assemble_structures(&n, &lib, 4) else { return Ok(()) };
        for g in &a.structures {
            let d = decompose_into_groups(g, &lib).unwrap();
            let m = g.rings().total() as i32 - 1;
            // Cycloalkane-like rings fail the literal sufficiency bound; only the balance is exact for them.
            let r = check_gc_basic(&d, &lib, m).unwrap();
            prop_assert!(r.valence_balance_ok(), "{}", r);
            if m == -1 {
                prop_assert!(r.ok(), "{}", r);
            }
        }
    }

    #[test]
    fn acyclic_signatures_pass_the_signature_check(g in common::trees(10), h in 1u32..3) {
        let cg = color_graph(&g, &ColoringScheme::degree()).unwrap();
        let n = signature_counts(&cg, h);
        let data = SdConstraintData::from_counts(h, &n, RingCounts::default()).unwrap();
        let r = check_sd_feasibility(&n, &data).unwrap();
        prop_assert!(r.ok(), "{}", r);
    }

    #[test]
    fn derived_assignment_passes_and_any_flip_fails(g in common::graphs(7), dummies in 0usize..2) {
        let t = TiAssignment::from_graph(&g, dummies);
        prop_assert!(check_ti_feasibility(&t).ok());
        let n = t.vertex_count();
        for v in 0..n {
            for w in v + 1..n {
                for b in BondType::ALL {
                    let mut flipped = t.clone();
                    let on = t.a(v, w, b) == 0;
                    if flipped.set_bond(v, w, b, on).is_err() {
                        continue;
                    }
                    prop_assert!(!check_ti_feasibility(&flipped).ok(), "flip {}-{} {:?}", v, w, b);
                }
            }
        }
    }

    #[test]
    fn checks_are_deterministic(counts in proptest::collection::vec(0u32..5, 4), m in -1i32..=1) {
        let lib = fixtures::library("fig8.lib").unwrap();
        let n: DescriptorVector = lib.names().into_iter().zip(counts).collect();
        prop_assert_eq!(check_gc_basic(&n, &lib, m), check_gc_basic(&n, &lib, m));
    }
}
