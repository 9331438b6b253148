//! Canonical labels by color refinement and individualization.
//!
//! Each leaf of the search tree yields a certificate string; the label is the
//! smallest one. Vertices in the same cell with identical neighborhoods are
//! interchangeable by an automorphism, so only one of them is individualized.

use std::collections::BTreeMap;

use super::{BondType, MolecularGraph};

/// Returns a string that is equal for two graphs iff they are isomorphic
/// respecting vertex colors, bond types and ring counts.
pub fn canonical_label(g: &MolecularGraph) -> String {
    let n = g.vertex_count();
    let invariants: Vec<String> = g
        .vertices()
        .iter()
        .map(|v| format!("{}:{}:{}:{}", v.element, v.open_valence, v.attached_hydrogens, v.hybridization))
        .collect();
    let initial = rank_by(&invariants);
    let colors = refine(g, initial);
    let mut best: Option<String> = None;
    search(g, &invariants, colors, &mut best);
    let rings = g.rings();
    let body = best.expect("search visits at least one leaf");
    debug_assert!(n > 0);
    format!("r{}.{}|{}", rings.aromatic, rings.aliphatic, body)
}

fn rank_by<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    keys.iter().map(|k| distinct.binary_search(k).expect("key present")).collect()
}

fn cell_count(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

fn refine(g: &MolecularGraph, mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let before = cell_count(&colors);
        let keys: Vec<(usize, Vec<(BondType, usize)>)> = (0..g.vertex_count())
            .map(|v| {
                let mut nb: Vec<(BondType, usize)> = g.neighbors(v).iter().map(|&(w, b)| (b, colors[w])).collect();
                nb.sort();
                (colors[v], nb)
            })
            .collect();
        colors = rank_by(&keys);
        if cell_count(&colors) == before {
            return colors;
        }
    }
}

fn certificate(g: &MolecularGraph, invariants: &[String], colors: &[usize]) -> String {
    let n = colors.len();
    let mut order = vec![0; n];
    for (v, &c) in colors.iter().enumerate() {
        order[c] = v;
    }
    let mut out = String::new();
    for &v in &order {
        out.push_str(&invariants[v]);
        out.push(',');
    }
    let mut edges: Vec<(usize, usize, &'static str)> = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (colors[e.a], colors[e.b]);
            (a.min(b), a.max(b), e.bond.token())
        })
        .collect();
    edges.sort();
    out.push('|');
    for (a, b, t) in edges {
        out.push_str(&format!("{a}-{b}:{t},"));
    }
    out
}

fn search(g: &MolecularGraph, invariants: &[String], colors: Vec<usize>, best: &mut Option<String>) {
    let n = colors.len();
    if cell_count(&colors) == n {
        let cert = certificate(g, invariants, &colors);
        if best.as_ref().is_none_or(|b| cert < *b) {
            *best = Some(cert);
        }
        return;
    }

    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        cells.entry(c).or_default().push(v);
    }
    let (&target, members) = cells
        .iter()
        .filter(|(_, m)| m.len() > 1)
        .min_by_key(|(c, m)| (m.len(), **c))
        .expect("non-discrete coloring has a non-singleton cell");

    let mut tried: Vec<Vec<(usize, BondType)>> = Vec::new();
    for &v in members {
        // Twins: same neighbor set once each other is excluded.
        let mut nb: Vec<(usize, BondType)> = g.neighbors(v).to_vec();
        nb.sort();
        if tried.iter().any(|t| twin(t, &nb, v)) {
            continue;
        }
        tried.push(nb.iter().copied().chain(std::iter::once((v, BondType::Single))).collect());

        let split: Vec<usize> = colors
            .iter()
            .enumerate()
            .map(|(w, &c)| if w == v { 2 * c } else if c == target { 2 * c + 1 } else { 2 * c })
            .collect();
        let next = refine(g, rank_by(&split));
        search(g, invariants, next, best);
    }
}

/// `tried` holds a previous representative's neighbors with the representative
/// itself appended last.
fn twin(tried: &[(usize, BondType)], nb: &[(usize, BondType)], v: usize) -> bool {
    let (&(u, _), tried_nb) = tried.split_last().expect("representative recorded");
    let strip = |list: &[(usize, BondType)], other: usize| -> Vec<(usize, BondType)> {
        list.iter().copied().filter(|&(w, _)| w != other).collect()
    };
    let a = strip(tried_nb, v);
    let b = strip(nb, u);
    let adjacent_a = tried_nb.iter().find(|&&(w, _)| w == v).map(|&(_, b)| b);
    let adjacent_b = nb.iter().find(|&&(w, _)| w == u).map(|&(_, b)| b);
    a == b && adjacent_a == adjacent_b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, RingCounts, VertexColor};

    fn chain(perm: &[usize]) -> MolecularGraph {
        let n = perm.len();
        let mut vs = vec![None; n];
        for i in 0..n {
            let d = if i == 0 || i == n - 1 { 1 } else { 2 };
            vs[perm[i]] = Some(VertexColor::sp3("C", d, 4 - d).unwrap());
        }
        let es: Vec<_> = (0..n - 1).map(|i| (perm[i], perm[i + 1], BondType::Single)).collect();
        build_graph(vs.into_iter().map(Option::unwrap).collect(), &es, RingCounts::default()).unwrap()
    }

    #[test]
    fn relabeled_paths_share_label() {
        let a = chain(&[0, 1, 2, 3, 4, 5]);
        let b = chain(&[3, 5, 0, 2, 1, 4]);
        assert_ne!(a, b);
        assert_eq!(canonical_label(&a), canonical_label(&b));
    }

    #[test]
    fn hexane_and_dimethylbutane_differ() {
        let hexane = chain(&[0, 1, 2, 3, 4, 5]);
        let vs = vec![
            VertexColor::sp3("C", 1, 3).unwrap(),
            VertexColor::sp3("C", 3, 1).unwrap(),
            VertexColor::sp3("C", 3, 1).unwrap(),
            VertexColor::sp3("C", 1, 3).unwrap(),
            VertexColor::sp3("C", 1, 3).unwrap(),
            VertexColor::sp3("C", 1, 3).unwrap(),
        ];
        let es = [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5)].map(|(a, b)| (a, b, BondType::Single));
        let dmb = build_graph(vs, &es, RingCounts::default()).unwrap();
        assert_ne!(canonical_label(&hexane), canonical_label(&dmb));
    }

    #[test]
    fn bond_type_is_part_of_label() {
        let single = build_graph(
            vec![VertexColor::sp3("C", 1, 3).unwrap(), VertexColor::sp3("C", 1, 3).unwrap()],
            &[(0, 1, BondType::Single)],
            RingCounts::default(),
        )
        .unwrap();
        let double = build_graph(
            vec![
                VertexColor::new("C", 1, 2, crate::graph::Hybridization::Sp2).unwrap(),
                VertexColor::new("C", 1, 2, crate::graph::Hybridization::Sp2).unwrap(),
            ],
            &[(0, 1, BondType::Double)],
            RingCounts::default(),
        )
        .unwrap();
        assert_ne!(canonical_label(&single), canonical_label(&double));
    }
}
