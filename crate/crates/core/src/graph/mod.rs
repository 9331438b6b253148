//! Hydrogen-suppressed chemical graphs.
//!
//! Hydrogens never appear as vertices; each heavy atom records its attached
//! hydrogen count. Bond orders are tracked in half units internally so that
//! aromatic bonds (order 1.5) stay in integer arithmetic.

mod canon;
mod groups;

pub use canon::canonical_label;
pub use groups::{decompose_into_groups, decompose_unique, Attachment, AttachmentKind, Fragment, Group, GroupLibrary};

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("invalid vertex color: {0}")]
    InvalidColor(String),
    #[error("edge endpoint {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("valence violation at vertex {vertex}: {detail}")]
    ValenceViolation { vertex: usize, detail: String },
    #[error("declared {declared} rings but cycle space has dimension {found}")]
    RingCountMismatch { declared: usize, found: usize },
    #[error("no exact cover of the graph by library groups")]
    NoCover,
    #[error("graph admits {0} distinct group decompositions")]
    AmbiguousCover(usize),
    #[error("invalid group `{name}`: {detail}")]
    InvalidGroup { name: String, detail: String },
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("duplicate group `{0}`")]
    DuplicateGroup(String),
}

/// Static data for the elements the engine knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementInfo {
    pub symbol: &'static str,
    pub atomic_number: u32,
    pub valence_electrons: u32,
    /// Allowed total bond valences, lowest first.
    pub valences: &'static [u32],
}

const ELEMENTS: &[ElementInfo] = &[
    ElementInfo { symbol: "H", atomic_number: 1, valence_electrons: 1, valences: &[1] },
    ElementInfo { symbol: "B", atomic_number: 5, valence_electrons: 3, valences: &[3] },
    ElementInfo { symbol: "C", atomic_number: 6, valence_electrons: 4, valences: &[4] },
    ElementInfo { symbol: "N", atomic_number: 7, valence_electrons: 5, valences: &[3, 5] },
    ElementInfo { symbol: "O", atomic_number: 8, valence_electrons: 6, valences: &[2] },
    ElementInfo { symbol: "F", atomic_number: 9, valence_electrons: 7, valences: &[1] },
    ElementInfo { symbol: "Si", atomic_number: 14, valence_electrons: 4, valences: &[4] },
    ElementInfo { symbol: "P", atomic_number: 15, valence_electrons: 5, valences: &[3, 5] },
    ElementInfo { symbol: "S", atomic_number: 16, valence_electrons: 6, valences: &[2, 4, 6] },
    ElementInfo { symbol: "Cl", atomic_number: 17, valence_electrons: 7, valences: &[1] },
    ElementInfo { symbol: "Br", atomic_number: 35, valence_electrons: 7, valences: &[1] },
    ElementInfo { symbol: "I", atomic_number: 53, valence_electrons: 7, valences: &[1] },
];

pub fn element_info(symbol: &str) -> Option<&'static ElementInfo> {
    ELEMENTS.iter().find(|e| e.symbol == symbol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hybridization {
    Sp,
    Sp2,
    Sp3,
    Aromatic,
}

impl Hybridization {
    pub fn as_str(self) -> &'static str {
        match self {
            Hybridization::Sp => "sp",
            Hybridization::Sp2 => "sp2",
            Hybridization::Sp3 => "sp3",
            Hybridization::Aromatic => "ar",
        }
    }
}

impl fmt::Display for Hybridization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Hybridization {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sp" => Ok(Hybridization::Sp),
            "sp2" => Ok(Hybridization::Sp2),
            "sp3" => Ok(Hybridization::Sp3),
            "ar" | "arom" | "aromatic" => Ok(Hybridization::Aromatic),
            other => Err(GraphError::InvalidColor(format!("unknown hybridization tag `{other}`"))),
        }
    }
}

/// Per-vertex chemistry: element, non-hydrogen degree, hybridization and
/// attached hydrogens, plus the electron counts used by valence-corrected
/// connectivity indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexColor {
    pub element: String,
    /// Number of non-hydrogen bonds (the vertex degree in the suppressed graph).
    pub open_valence: u32,
    pub hybridization: Hybridization,
    pub attached_hydrogens: u32,
    pub valence_electrons: u32,
    pub atomic_number: u32,
}

impl VertexColor {
    /// Builds a color with Z and Z^V looked up from the element table.
    pub fn new(
        element: &str,
        open_valence: u32,
        attached_hydrogens: u32,
        hybridization: Hybridization,
    ) -> Result<Self, GraphError> {
        let info = element_info(element).ok_or_else(|| GraphError::UnknownElement(element.to_string()))?;
        Ok(Self {
            element: info.symbol.to_string(),
            open_valence,
            hybridization,
            attached_hydrogens,
            valence_electrons: info.valence_electrons,
            atomic_number: info.atomic_number,
        })
    }

    /// Shorthand for an sp3 atom.
    pub fn sp3(element: &str, open_valence: u32, attached_hydrogens: u32) -> Result<Self, GraphError> {
        Self::new(element, open_valence, attached_hydrogens, Hybridization::Sp3)
    }

    pub fn is_aromatic(&self) -> bool {
        self.hybridization == Hybridization::Aromatic
    }

    fn check_invariants(&self) -> Result<(), GraphError> {
        if self.valence_electrons < 1 || self.atomic_number < self.valence_electrons {
            return Err(GraphError::InvalidColor(format!(
                "{}: need Z >= Z^V >= 1 (Z={}, Z^V={})",
                self.element, self.atomic_number, self.valence_electrons
            )));
        }
        Ok(())
    }

    fn allowed_valences(&self) -> &'static [u32] {
        element_info(&self.element).map(|e| e.valences).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondType {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondType {
    pub const ALL: [BondType; 4] = [BondType::Single, BondType::Double, BondType::Triple, BondType::Aromatic];

    /// Bond order in half units: 2, 4, 6, and 3 for aromatic.
    pub fn half_units(self) -> u32 {
        match self {
            BondType::Single => 2,
            BondType::Double => 4,
            BondType::Triple => 6,
            BondType::Aromatic => 3,
        }
    }

    /// Token used by the line-oriented graph format.
    pub fn token(self) -> &'static str {
        match self {
            BondType::Single => "1",
            BondType::Double => "2",
            BondType::Triple => "3",
            BondType::Aromatic => "ar",
        }
    }

    /// Prefix written before a child in a signature string.
    pub fn signature_prefix(self) -> &'static str {
        match self {
            BondType::Single => "",
            BondType::Double => "=",
            BondType::Triple => "#",
            BondType::Aromatic => ":",
        }
    }

    pub fn index(self) -> usize {
        match self {
            BondType::Single => 0,
            BondType::Double => 1,
            BondType::Triple => 2,
            BondType::Aromatic => 3,
        }
    }
}

impl FromStr for BondType {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(BondType::Single),
            "2" => Ok(BondType::Double),
            "3" => Ok(BondType::Triple),
            "ar" | "a" | "4" => Ok(BondType::Aromatic),
            other => Err(GraphError::InvalidColor(format!("unknown bond order `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub bond: BondType,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct RingCounts {
    pub aromatic: usize,
    pub aliphatic: usize,
}

impl RingCounts {
    pub fn new(aromatic: usize, aliphatic: usize) -> Self {
        Self { aromatic, aliphatic }
    }

    pub fn total(self) -> usize {
        self.aromatic + self.aliphatic
    }
}

/// A validated, connected, hydrogen-suppressed molecular graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolecularGraph {
    vertices: Vec<VertexColor>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, BondType)>>,
    rings: RingCounts,
}

impl MolecularGraph {
    pub fn vertices(&self) -> &[VertexColor] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &VertexColor {
        &self.vertices[v]
    }

    /// Edges with `a < b`, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, BondType)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn rings(&self) -> RingCounts {
        self.rings
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<BondType> {
        self.adjacency[a].iter().find(|(w, _)| *w == b).map(|&(_, bond)| bond)
    }

    /// Relabels vertices so that old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> MolecularGraph {
        assert_eq!(perm.len(), self.vertices.len(), "permutation length");
        let mut vertices = vec![None; self.vertices.len()];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = Some(self.vertices[old].clone());
        }
        let vertices: Vec<VertexColor> = vertices.into_iter().map(|v| v.expect("perm is a bijection")).collect();
        let edges: Vec<(usize, usize, BondType)> = self.edges.iter().map(|e| (perm[e.a], perm[e.b], e.bond)).collect();
        build_graph(vertices, &edges, self.rings).expect("relabeling preserves validity")
    }
}

/// Validates and assembles a molecular graph.
///
/// Checks run in a fixed order: edge indices, self-loops and duplicates, then
/// connectivity, then per-vertex valence, then the declared ring count against
/// the cycle-space dimension `|E| - |V| + 1`.
pub fn build_graph(
    vertices: Vec<VertexColor>,
    edges: &[(usize, usize, BondType)],
    rings: RingCounts,
) -> Result<MolecularGraph, GraphError> {
    if vertices.is_empty() {
        return Err(GraphError::Empty);
    }
    for v in &vertices {
        v.check_invariants()?;
    }
    let n = vertices.len();
    let mut adjacency: Vec<Vec<(usize, BondType)>> = vec![Vec::new(); n];
    let mut norm: Vec<Edge> = Vec::with_capacity(edges.len());
    for &(a, b, bond) in edges {
        for idx in [a, b] {
            if idx >= n {
                return Err(GraphError::IndexOutOfRange { index: idx, len: n });
            }
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if adjacency[a].iter().any(|(w, _)| *w == b) {
            return Err(GraphError::DuplicateEdge(a, b));
        }
        adjacency[a].push((b, bond));
        adjacency[b].push((a, bond));
        norm.push(Edge { a, b, bond });
    }
    norm.sort();
    for list in &mut adjacency {
        list.sort();
    }

    if !is_connected(&adjacency) {
        return Err(GraphError::Disconnected);
    }

    for (i, v) in vertices.iter().enumerate() {
        let degree = adjacency[i].len() as u32;
        if degree != v.open_valence {
            return Err(GraphError::ValenceViolation {
                vertex: i,
                detail: format!("declared {} non-H bonds, found {degree}", v.open_valence),
            });
        }
        let half: u32 = adjacency[i].iter().map(|(_, b)| b.half_units()).sum::<u32>() + 2 * v.attached_hydrogens;
        if !half.is_multiple_of(2) || !v.allowed_valences().contains(&(half / 2)) {
            return Err(GraphError::ValenceViolation {
                vertex: i,
                detail: format!(
                    "{} with bond-order sum {} (incl. {} H) is not an allowed valence {:?}",
                    v.element,
                    f64::from(half) / 2.0,
                    v.attached_hydrogens,
                    v.allowed_valences()
                ),
            });
        }
    }

    let found = norm.len() + 1 - n;
    if found != rings.total() {
        return Err(GraphError::RingCountMismatch { declared: rings.total(), found });
    }

    Ok(MolecularGraph { vertices, edges: norm, adjacency, rings })
}

fn is_connected(adjacency: &[Vec<(usize, BondType)>]) -> bool {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

/// All-pairs shortest path lengths on unit edge weights (BFS from every vertex).
pub fn distance_matrix(g: &MolecularGraph) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let mut dist = vec![vec![u32::MAX; n]; n];
    for (start, row) in dist.iter_mut().enumerate() {
        row[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in g.neighbors(v) {
                if row[w] == u32::MAX {
                    row[w] = row[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}
