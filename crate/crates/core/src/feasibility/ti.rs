//! Adjacency-tensor constraints: per-bond-type valence balance and the
//! lower-index connectivity condition.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use super::{write_lines, CheckLine, FeasibilityError};
use crate::graph::{BondType, MolecularGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeType {
    pub name: String,
    /// Non-H degree δ_l.
    pub delta: u32,
    /// Required bonds per type, indexed by [`BondType::index`].
    pub phi: [u32; 4],
    pub dummy: bool,
}

impl NodeType {
    pub fn dummy() -> Self {
        Self { name: "dummy".into(), delta: 0, phi: [0; 4], dummy: true }
    }
}

/// Vertex-to-type assignment `y` and bond tensor `a` over a fixed vertex count.
///
/// `y` is stored as one type index per vertex and `a` as at most one bond type
/// per unordered pair, so both structural invariants hold by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiAssignment {
    node_types: Vec<NodeType>,
    y: Vec<usize>,
    a: BTreeMap<(usize, usize), BondType>,
}

impl TiAssignment {
    pub fn new(
        node_types: Vec<NodeType>,
        y: Vec<usize>,
        bonds: &[(usize, usize, BondType)],
    ) -> Result<Self, FeasibilityError> {
        let bad = |s: String| FeasibilityError::InvalidAssignment(s);
        if let Some((v, &l)) = y.iter().enumerate().find(|(_, &l)| l >= node_types.len()) {
            return Err(bad(format!("vertex {v} has unknown type index {l}")));
        }
        let mut a = BTreeMap::new();
        for &(v, w, b) in bonds {
            if v >= y.len() || w >= y.len() || v == w {
                return Err(bad(format!("invalid bond {v}-{w}")));
            }
            if a.insert((v.min(w), v.max(w)), b).is_some() {
                return Err(bad(format!("more than one bond between {v} and {w}")));
            }
        }
        Ok(Self { node_types, y, a })
    }

    /// Types are the distinct (color, per-bond-type count) combinations, named
    /// after the first vertex carrying them. Vertices are renumbered in
    /// breadth-first order and `dummies` dummy vertices are appended.
    pub fn from_graph(g: &MolecularGraph, dummies: usize) -> Self {
        let n = g.vertex_count();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, _) in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let mut new_index = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            new_index[v] = i;
        }

        let mut node_types: Vec<NodeType> = Vec::new();
        let mut keys: Vec<(String, [u32; 4])> = Vec::new();
        let mut y = Vec::with_capacity(n + dummies);
        for &v in &order {
            let c = g.vertex(v);
            let mut phi = [0u32; 4];
            for &(_, b) in g.neighbors(v) {
                phi[b.index()] += 1;
            }
            let key = (format!("{}:{}:{}", c.element, c.attached_hydrogens, c.hybridization), phi);
            let l = match keys.iter().position(|k| *k == key) {
                Some(l) => l,
                None => {
                    keys.push(key);
                    node_types.push(NodeType {
                        name: format!("{}H{}_{}", c.element, c.attached_hydrogens, node_types.len()),
                        delta: c.open_valence,
                        phi,
                        dummy: false,
                    });
                    node_types.len() - 1
                }
            };
            y.push(l);
        }
        if dummies > 0 {
            node_types.push(NodeType::dummy());
            y.extend(std::iter::repeat_n(node_types.len() - 1, dummies));
        }
        let bonds: Vec<_> = g.edges().iter().map(|e| (new_index[e.a], new_index[e.b], e.bond)).collect();
        Self::new(node_types, y, &bonds).expect("graph edges are a valid assignment")
    }

    pub fn vertex_count(&self) -> usize {
        self.y.len()
    }

    pub fn node_types(&self) -> &[NodeType] {
        &self.node_types
    }

    /// Type index of every vertex.
    pub fn type_indices(&self) -> &[usize] {
        &self.y
    }

    pub fn type_of(&self, v: usize) -> &NodeType {
        &self.node_types[self.y[v]]
    }

    /// y_{v,l}
    pub fn y(&self, v: usize, l: usize) -> u32 {
        u32::from(self.y[v] == l)
    }

    /// a_{v,v',b}, symmetric.
    pub fn a(&self, v: usize, w: usize, b: BondType) -> u32 {
        u32::from(self.a.get(&(v.min(w), v.max(w))) == Some(&b))
    }

    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize, BondType)> + '_ {
        self.a.iter().map(|(&(v, w), &b)| (v, w, b))
    }

    /// Sets or clears one entry of the tensor. Setting a bond on a pair that
    /// already has a different one is rejected.
    pub fn set_bond(&mut self, v: usize, w: usize, b: BondType, on: bool) -> Result<(), FeasibilityError> {
        let key = (v.min(w), v.max(w));
        if v == w || key.1 >= self.y.len() {
            return Err(FeasibilityError::InvalidAssignment(format!("invalid pair {v}-{w}")));
        }
        match (self.a.get(&key).copied(), on) {
            (Some(old), true) if old != b => Err(FeasibilityError::InvalidAssignment(format!(
                "pair {v}-{w} already bonded"
            ))),
            (_, true) => {
                self.a.insert(key, b);
                Ok(())
            }
            (Some(old), false) if old == b => {
                self.a.remove(&key);
                Ok(())
            }
            (_, false) => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiValenceCheck {
    pub vertex: usize,
    pub bond: BondType,
    pub sum: u32,
    pub required: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiConnectivityCheck {
    pub vertex: usize,
    pub lower_sum: u32,
    pub required: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiFeasibilityReport {
    pub valence: Vec<TiValenceCheck>,
    pub connectivity: Vec<TiConnectivityCheck>,
}

impl TiFeasibilityReport {
    pub fn valence_ok(&self, vertex: usize) -> bool {
        self.valence.iter().filter(|c| c.vertex == vertex).all(|c| c.sum == c.required)
    }

    pub fn connectivity_ok(&self, vertex: usize) -> bool {
        self.connectivity.iter().filter(|c| c.vertex == vertex).all(|c| c.lower_sum >= c.required)
    }

    pub fn ok(&self) -> bool {
        self.valence.iter().all(|c| c.sum == c.required) && self.connectivity.iter().all(|c| c.lower_sum >= c.required)
    }

    pub fn lines(&self) -> Vec<CheckLine> {
        let mut out = Vec::new();
        for c in &self.valence {
            out.push(CheckLine::new(
                format!("valence[v{},b{}]", c.vertex + 1, c.bond.token()),
                c.sum == c.required,
                i64::from(c.sum) - i64::from(c.required),
            ));
        }
        for c in &self.connectivity {
            out.push(CheckLine::new(
                format!("connectivity[v{}]", c.vertex + 1),
                c.lower_sum >= c.required,
                i64::from(c.lower_sum) - i64::from(c.required),
            ));
        }
        out
    }
}

impl fmt::Display for TiFeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_lines(f, &self.lines())
    }
}

/// Vertex indices in the report are zero-based; the text form is one-based.
pub fn check_ti_feasibility(t: &TiAssignment) -> TiFeasibilityReport {
    let n = t.vertex_count();
    let mut valence = Vec::new();
    for v in 0..n {
        let ty = t.type_of(v);
        for b in BondType::ALL {
            let sum: u32 = (0..n).filter(|&w| w != v).map(|w| t.a(v, w, b)).sum();
            let required = ty.phi[b.index()];
            if sum != 0 || required != 0 {
                valence.push(TiValenceCheck { vertex: v, bond: b, sum, required });
            }
        }
    }
    let connectivity = (1..n)
        .map(|w| TiConnectivityCheck {
            vertex: w,
            lower_sum: (0..w).map(|v| BondType::ALL.iter().map(|&b| t.a(v, w, b)).sum::<u32>()).sum(),
            required: u32::from(!t.type_of(w).dummy),
        })
        .collect();
    TiFeasibilityReport { valence, connectivity }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Hybridization, RingCounts, VertexColor};

    fn methylpentene() -> TiAssignment {
        let ty = |name: &str, single, double| NodeType {
            name: name.into(),
            delta: single + double,
            phi: [single, double, 0, 0],
            dummy: false,
        };
        let types = vec![ty("CH3-", 1, 0), ty("=CH-", 1, 1), ty("=CH0<", 2, 1), ty("-CH2-", 2, 0)];
        let bonds = [
            (0, 1, BondType::Single),
            (2, 3, BondType::Single),
            (3, 4, BondType::Single),
            (4, 5, BondType::Single),
            (1, 3, BondType::Double),
        ];
        TiAssignment::new(types, vec![0, 1, 0, 2, 3, 0], &bonds).unwrap()
    }

    #[test]
    fn worked_vertex_four() {
        let r = check_ti_feasibility(&methylpentene());
        let v4: Vec<_> = r.valence.iter().filter(|c| c.vertex == 3).map(|c| (c.sum, c.required)).collect();
        assert_eq!(v4, vec![(2, 2), (1, 1)]);
        let c4 = r.connectivity.iter().find(|c| c.vertex == 3).unwrap();
        assert_eq!((c4.lower_sum, c4.required), (2, 1));
        // Vertex 3 is only bonded to vertex 4.
        assert!(!r.connectivity_ok(2));
    }

    #[test]
    fn graph_derived_assignment_passes() {
        let vs = vec![
            VertexColor::new("C", 1, 2, Hybridization::Sp2).unwrap(),
            VertexColor::new("C", 2, 1, Hybridization::Sp2).unwrap(),
            VertexColor::sp3("C", 1, 3).unwrap(),
        ];
        let g = build_graph(vs, &[(0, 1, BondType::Double), (1, 2, BondType::Single)], RingCounts::default()).unwrap();
        let t = TiAssignment::from_graph(&g, 2);
        assert_eq!(t.vertex_count(), 5);
        assert!(check_ti_feasibility(&t).ok());
    }

    #[test]
    fn second_bond_on_pair_is_rejected() {
        let mut t = methylpentene();
        assert!(t.set_bond(0, 1, BondType::Double, true).is_err());
        t.set_bond(0, 1, BondType::Single, false).unwrap();
        assert!(!check_ti_feasibility(&t).ok());
    }
}
