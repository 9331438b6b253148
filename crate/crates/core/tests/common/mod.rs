//! Random molecular graphs for property tests.

#![allow(dead_code)]

use camd_core::graph::{build_graph, BondType, MolecularGraph, RingCounts, VertexColor};
use proptest::prelude::*;

/// Spanning tree from raw parent picks, plus an optional ring-closing chord.
/// Elements are picked from the degree: carbon always, nitrogen up to three
/// neighbours, oxygen up to two.
pub fn build(parents: &[usize], elements: &[u8], chord: Option<(usize, usize)>) -> MolecularGraph {
    let n = parents.len() + 1;
    let mut deg = vec![0u32; n];
    let mut edges = Vec::new();
    for (i, &raw) in parents.iter().enumerate() {
        let child = i + 1;
        let mut p = raw % child;
        if deg[p] >= 4 {
            p = (0..child).find(|&v| deg[v] < 4).expect("a tree always has a leaf");
        }
        deg[p] += 1;
        deg[child] += 1;
        edges.push((p, child, BondType::Single));
    }
    let mut rings = 0;
    if let Some((a, b)) = chord {
        let (a, b) = (a % n, b % n);
        let adjacent = edges.iter().any(|&(x, y, _)| (x, y) == (a.min(b), a.max(b)) || (x, y) == (a.max(b), a.min(b)));
        if a != b && !adjacent && deg[a] < 4 && deg[b] < 4 {
            deg[a] += 1;
            deg[b] += 1;
            edges.push((a, b, BondType::Single));
            rings = 1;
        }
    }
    let vertices = (0..n)
        .map(|v| {
            let d = deg[v];
            let pick = elements.get(v).copied().unwrap_or(0) % 4;
            let (el, valence) = match pick {
                1 if d <= 3 => ("N", 3),
                2 if d <= 2 => ("O", 2),
                _ => ("C", 4),
            };
            VertexColor::sp3(el, d, valence - d).expect("valid color")
        })
        .collect();
    build_graph(vertices, &edges, RingCounts::new(0, rings)).expect("valid graph")
}

pub fn graphs(max_vertices: usize) -> impl Strategy<Value = MolecularGraph> {
    (1..=max_vertices)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<usize>(), n - 1),
                proptest::collection::vec(any::<u8>(), n),
                proptest::option::of((any::<usize>(), any::<usize>())),
            )
        })
        .prop_map(|(p, e, c)| build(&p, &e, c))
}

pub fn trees(max_vertices: usize) -> impl Strategy<Value = MolecularGraph> {
    (1..=max_vertices)
        .prop_flat_map(|n| (proptest::collection::vec(any::<usize>(), n - 1), proptest::collection::vec(any::<u8>(), n)))
        .prop_map(|(p, e)| build(&p, &e, None))
}

/// A graph together with a permutation of its vertices.
pub fn relabelled(max_vertices: usize) -> impl Strategy<Value = (MolecularGraph, Vec<usize>)> {
    graphs(max_vertices).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}
