mod common;

use std::collections::BTreeMap;

use camd_core::graph::{
    build_graph, canonical_label, decompose_into_groups, distance_matrix, Fragment, Group, GroupLibrary, GraphError,
    MolecularGraph,
};
use proptest::prelude::*;

fn floyd_warshall(g: &MolecularGraph) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let inf = u32::MAX / 2;
    let mut d = vec![vec![inf; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for e in g.edges() {
        d[e.a][e.b] = 1;
        d[e.b][e.a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// One single-atom group per distinct vertex color.
fn atom_library(g: &MolecularGraph) -> GroupLibrary {
    let mut seen = BTreeMap::new();
    for v in g.vertices() {
        let name = format!("{}{}h{}", v.element, v.open_valence, v.attached_hydrogens);
        seen.entry(name).or_insert_with(|| v.clone());
    }
    let groups = seen
        .into_iter()
        .map(|(name, c)| Group::simple(&name, c.open_valence).with_pattern(Fragment::atom(c)))
        .collect();
    GroupLibrary::new(groups).unwrap()
}

fn parts(g: &MolecularGraph) -> (Vec<camd_core::graph::VertexColor>, Vec<(usize, usize, camd_core::graph::BondType)>) {
    (g.vertices().to_vec(), g.edges().iter().map(|e| (e.a, e.b, e.bond)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn label_is_invariant_under_relabeling((g, perm) in common::relabelled(12)) {
        prop_assert_eq!(canonical_label(&g), canonical_label(&g.permuted(&perm)));
    }

    #[test]
    fn distances_match_floyd_warshall(g in common::graphs(12)) {
        prop_assert_eq!(distance_matrix(&g), floyd_warshall(&g));
    }

    #[test]
    fn decomposition_covers_every_atom_once(g in common::graphs(10)) {
        let lib = atom_library(&g);
        let n = decompose_into_groups(&g, &lib).unwrap();
        let atoms: u64 = n.iter().map(|(name, c)| lib.get(name).unwrap().pattern.as_ref().unwrap().atom_count() as u64 * u64::from(c)).sum();
        prop_assert_eq!(atoms, g.vertex_count() as u64);
    }

    #[test]
    fn removing_a_tree_edge_disconnects(g in common::trees(10), pick in any::<usize>()) {
        prop_assume!(g.edge_count() > 0);
        let (vs, mut es) = parts(&g);
        es.remove(pick % es.len());
        prop_assert_eq!(build_graph(vs, &es, g.rings()), Err(GraphError::Disconnected));
    }

    #[test]
    fn adding_an_edge_violates_valence(g in common::graphs(10), a in any::<usize>(), b in any::<usize>()) {
        let n = g.vertex_count();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b && g.bond_between(a, b).is_none());
        let (vs, mut es) = parts(&g);
        es.push((a, b, camd_core::graph::BondType::Single));
        let r = build_graph(vs, &es, g.rings());
        prop_assert!(matches!(r, Err(GraphError::ValenceViolation { .. })), "{:?}", r);
    }
}

#[test]
fn fixture_labels_survive_500_relabelings() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for name in ["dmb.graph", "tmb.graph", "nhexane.graph", "cyclohexane.graph", "fig5.graph"] {
        let g = camd_core::fixtures::graph(name).unwrap();
        let label = canonical_label(&g);
        let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
        for _ in 0..500 {
            perm.shuffle(&mut rng);
            assert_eq!(canonical_label(&g.permuted(&perm)), label, "{name}");
        }
        assert_eq!(distance_matrix(&g), floyd_warshall(&g), "{name}");
    }
}

#[test]
fn distinct_isomers_get_distinct_labels() {
    let labels: Vec<String> = ["dmb.graph", "nhexane.graph", "cyclohexane.graph"]
        .iter()
        .map(|n| canonical_label(&camd_core::fixtures::graph(n).unwrap()))
        .collect();
    assert_ne!(labels[0], labels[1]);
    assert_ne!(labels[1], labels[2]);
}
