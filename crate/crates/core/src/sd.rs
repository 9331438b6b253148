//! Signature descriptors: vertex coloring, atomic signatures and SD models.
//!
//! A signature of height h is the breadth-first tree of a root atom cut at
//! depth h. A node at depth k has as children its neighbors at distance k+1
//! from the root, so a vertex reached along two shortest paths appears under
//! both parents. Children are sorted by their rendered strings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::descriptor::DescriptorVector;
use crate::gc::GcModel;
use crate::graph::{BondType, Hybridization, MolecularGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdError {
    #[error("no coloring rule of scheme `{scheme}` matches {element} (vertex {vertex})")]
    UncoloredElement { scheme: String, element: String, vertex: usize },
    #[error("no counts supplied for height {0}")]
    MissingHeight(u32),
    #[error("malformed signature `{0}`")]
    Malformed(String),
    #[error("unknown coloring scheme `{0}`")]
    UnknownScheme(String),
}

/// One coloring rule. `None` fields match anything.
///
/// The label may use `{el}` (element), `{deg}` (non-H degree in the
/// hydrogen-suppressed graph) and `{parent}` (element a hydrogen is bonded to).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorRule {
    pub element: Option<String>,
    pub hybridization: Option<Hybridization>,
    pub aromatic: Option<bool>,
    pub degree: Option<u32>,
    pub parent_element: Option<String>,
    pub label: String,
}

impl ColorRule {
    pub fn any(label: &str) -> Self {
        Self { element: None, hybridization: None, aromatic: None, degree: None, parent_element: None, label: label.into() }
    }

    fn matches(&self, atom: &AtomKey<'_>) -> bool {
        self.element.as_deref().is_none_or(|e| e == atom.element)
            && self.hybridization.is_none_or(|h| Some(h) == atom.hybridization)
            && self.aromatic.is_none_or(|a| a == atom.aromatic)
            && self.degree.is_none_or(|d| d == atom.degree)
            && self.parent_element.as_deref().is_none_or(|p| Some(p) == atom.parent)
    }

    fn render(&self, atom: &AtomKey<'_>) -> String {
        self.label
            .replace("{el}", atom.element)
            .replace("{deg}", &atom.degree.to_string())
            .replace("{parent}", atom.parent.unwrap_or(""))
    }
}

struct AtomKey<'a> {
    element: &'a str,
    hybridization: Option<Hybridization>,
    aromatic: bool,
    degree: u32,
    parent: Option<&'a str>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringScheme {
    pub name: String,
    pub rules: Vec<ColorRule>,
    /// Add hydrogens as colored vertices.
    pub explicit_hydrogens: bool,
    /// Write `=`, `#`, `:` before children joined by double, triple or aromatic bonds.
    pub bond_prefixes: bool,
}

impl ColoringScheme {
    /// Element plus non-H degree, e.g. `C2`; hydrogens stay implicit.
    pub fn degree() -> Self {
        Self { name: "degree".into(), rules: vec![ColorRule::any("{el}{deg}")], explicit_hydrogens: false, bond_prefixes: true }
    }

    /// `a{el}` for aromatic atoms, `{el}1`/`{el}2`/`{el}3` for sp/sp2/sp3, and
    /// explicit hydrogens colored by their neighbor (`H_A` on nitrogen).
    pub fn hybrid() -> Self {
        let h = |parent: Option<&str>, label: &str| ColorRule {
            element: Some("H".into()),
            parent_element: parent.map(str::to_string),
            ..ColorRule::any(label)
        };
        let tag = |t: Hybridization, label: &str| ColorRule { hybridization: Some(t), ..ColorRule::any(label) };
        Self {
            name: "hybrid".into(),
            rules: vec![
                h(Some("N"), "H_A"),
                h(Some("O"), "H_O"),
                h(Some("C"), "H_C"),
                h(None, "H_{parent}"),
                ColorRule { aromatic: Some(true), ..ColorRule::any("a{el}") },
                tag(Hybridization::Sp, "{el}1"),
                tag(Hybridization::Sp2, "{el}2"),
                tag(Hybridization::Sp3, "{el}3"),
            ],
            explicit_hydrogens: true,
            bond_prefixes: false,
        }
    }

    pub fn builtin(name: &str) -> Result<Self, SdError> {
        match name {
            "degree" => Ok(Self::degree()),
            "hybrid" => Ok(Self::hybrid()),
            other => Err(SdError::UnknownScheme(other.into())),
        }
    }

    fn color(&self, atom: &AtomKey<'_>, vertex: usize) -> Result<String, SdError> {
        self.rules.iter().find(|r| r.matches(atom)).map(|r| r.render(atom)).ok_or_else(|| SdError::UncoloredElement {
            scheme: self.name.clone(),
            element: atom.element.to_string(),
            vertex,
        })
    }
}

/// A graph with one color label per vertex. Explicit hydrogens, when the
/// scheme asks for them, follow the heavy atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    pub labels: Vec<String>,
    pub adjacency: Vec<Vec<(usize, BondType)>>,
    pub bond_prefixes: bool,
}

impl ColoredGraph {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }
}

pub fn color_graph(g: &MolecularGraph, scheme: &ColoringScheme) -> Result<ColoredGraph, SdError> {
    let mut labels = Vec::new();
    let mut adjacency: Vec<Vec<(usize, BondType)>> = (0..g.vertex_count()).map(|v| g.neighbors(v).to_vec()).collect();
    for (v, c) in g.vertices().iter().enumerate() {
        let key = AtomKey {
            element: &c.element,
            hybridization: Some(c.hybridization),
            aromatic: c.is_aromatic(),
            degree: c.open_valence,
            parent: None,
        };
        labels.push(scheme.color(&key, v)?);
    }
    if scheme.explicit_hydrogens {
        for (v, c) in g.vertices().iter().enumerate() {
            for _ in 0..c.attached_hydrogens {
                let key = AtomKey { element: "H", hybridization: None, aromatic: false, degree: 1, parent: Some(&c.element) };
                let id = labels.len();
                labels.push(scheme.color(&key, id)?);
                adjacency.push(vec![(v, BondType::Single)]);
                adjacency[v].push((id, BondType::Single));
            }
        }
    }
    Ok(ColoredGraph { labels, adjacency, bond_prefixes: scheme.bond_prefixes })
}

/// Parsed signature: a label and the bond and subtree of each child.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignatureTree {
    pub label: String,
    pub children: Vec<(Option<BondType>, SignatureTree)>,
}

impl SignatureTree {
    pub fn depth(&self) -> usize {
        self.children.iter().map(|(_, c)| c.depth() + 1).max().unwrap_or(0)
    }

    /// Recursive string with children sorted by their own rendering.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .children
            .iter()
            .map(|(bond, c)| format!("{}{}", bond.map_or("", BondType::signature_prefix), c.render()))
            .collect();
        parts.sort();
        let mut out = self.label.clone();
        for p in parts {
            out.push('(');
            out.push_str(&p);
            out.push(')');
        }
        out
    }

    pub fn parse(s: &str) -> Result<Self, SdError> {
        let bytes: Vec<char> = s.chars().collect();
        let mut pos = 0;
        let tree = Self::parse_node(&bytes, &mut pos).ok_or_else(|| SdError::Malformed(s.into()))?;
        if pos != bytes.len() {
            return Err(SdError::Malformed(s.into()));
        }
        Ok(tree)
    }

    fn parse_node(s: &[char], pos: &mut usize) -> Option<Self> {
        let start = *pos;
        while *pos < s.len() && !matches!(s[*pos], '(' | ')') {
            *pos += 1;
        }
        if *pos == start {
            return None;
        }
        let label: String = s[start..*pos].iter().collect();
        let mut children = Vec::new();
        while *pos < s.len() && s[*pos] == '(' {
            *pos += 1;
            let bond = match s.get(*pos) {
                Some('=') => Some(BondType::Double),
                Some('#') => Some(BondType::Triple),
                Some(':') => Some(BondType::Aromatic),
                _ => None,
            };
            if bond.is_some() {
                *pos += 1;
            }
            let child = Self::parse_node(s, pos)?;
            if s.get(*pos) != Some(&')') {
                return None;
            }
            *pos += 1;
            children.push((bond, child));
        }
        Some(Self { label, children })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicSignature {
    pub root: usize,
    pub height: u32,
    pub canonical: String,
}

fn bfs_distances(g: &ColoredGraph, root: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &g.adjacency[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn unfold(g: &ColoredGraph, dist: &[usize], v: usize, depth: usize, height: usize) -> SignatureTree {
    let children = if depth == height {
        Vec::new()
    } else {
        g.adjacency[v]
            .iter()
            .filter(|&&(w, _)| dist[w] == depth + 1)
            .map(|&(w, b)| {
                let bond = (g.bond_prefixes && b != BondType::Single).then_some(b);
                (bond, unfold(g, dist, w, depth + 1, height))
            })
            .collect()
    };
    SignatureTree { label: g.labels[v].clone(), children }
}

pub fn signature_tree(g: &ColoredGraph, root: usize, height: u32) -> SignatureTree {
    let dist = bfs_distances(g, root);
    unfold(g, &dist, root, 0, height as usize)
}

pub fn atomic_signature(g: &ColoredGraph, root: usize, height: u32) -> AtomicSignature {
    AtomicSignature { root, height, canonical: signature_tree(g, root, height).render() }
}

/// Occurrences of each height-h signature over all colored vertices.
pub fn signature_counts(g: &ColoredGraph, height: u32) -> DescriptorVector {
    (0..g.vertex_count()).map(|v| (atomic_signature(g, v, height).canonical, 1)).collect()
}

/// `p = sum_i sum_d c_d n_d^i`
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SdModel {
    pub property: String,
    pub coefficients: BTreeMap<(u32, String), f64>,
    pub heights_used: BTreeSet<u32>,
}

impl SdModel {
    pub fn new(property: &str) -> Self {
        Self { property: property.into(), ..Self::default() }
    }

    pub fn with(mut self, height: u32, signature: &str, coefficient: f64) -> Self {
        self.coefficients.insert((height, signature.to_string()), coefficient);
        self.heights_used.insert(height);
        self
    }

    /// Linear model over the signatures of one height.
    pub fn at_height(&self, height: u32) -> GcModel {
        let coeffs = self.coefficients.iter().filter(|((h, _), _)| *h == height).map(|((_, s), c)| (s.clone(), *c));
        GcModel::linear(&self.property, coeffs)
    }
}

/// Signatures absent from the model contribute nothing.
pub fn estimate_sd(model: &SdModel, counts: &BTreeMap<u32, DescriptorVector>) -> Result<f64, SdError> {
    let mut total = 0.0;
    for &h in &model.heights_used {
        let n = counts.get(&h).ok_or(SdError::MissingHeight(h))?;
        for (sig, c) in n.iter() {
            if let Some(coef) = model.coefficients.get(&(h, sig.to_string())) {
                total += coef * f64::from(c);
            }
        }
    }
    Ok(total)
}

impl fmt::Display for AtomicSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, RingCounts, VertexColor};

    fn ethane() -> MolecularGraph {
        let c = VertexColor::sp3("C", 1, 3).unwrap();
        build_graph(vec![c.clone(), c], &[(0, 1, BondType::Single)], RingCounts::default()).unwrap()
    }

    #[test]
    fn ethane_height_one() {
        let cg = color_graph(&ethane(), &ColoringScheme::degree()).unwrap();
        assert_eq!(signature_counts(&cg, 1), DescriptorVector::from_pairs([("C1(C1)", 2)]));
    }

    #[test]
    fn height_zero_is_color() {
        let cg = color_graph(&ethane(), &ColoringScheme::degree()).unwrap();
        assert_eq!(atomic_signature(&cg, 0, 0).canonical, "C1");
    }

    #[test]
    fn hybrid_scheme_colors_hydrogens() {
        let vs = vec![VertexColor::sp3("N", 1, 2).unwrap(), VertexColor::sp3("C", 1, 3).unwrap()];
        let g = build_graph(vs, &[(0, 1, BondType::Single)], RingCounts::default()).unwrap();
        let cg = color_graph(&g, &ColoringScheme::hybrid()).unwrap();
        assert_eq!(cg.vertex_count(), 7);
        assert_eq!(cg.labels.iter().filter(|l| *l == "H_A").count(), 2);
        assert_eq!(cg.labels.iter().filter(|l| *l == "H_C").count(), 3);
        assert_eq!(atomic_signature(&cg, 0, 1).canonical, "N3(C3)(H_A)(H_A)");
    }

    #[test]
    fn uncolored_element() {
        let scheme = ColoringScheme {
            rules: vec![ColorRule { element: Some("O".into()), ..ColorRule::any("O") }],
            ..ColoringScheme::degree()
        };
        assert!(matches!(color_graph(&ethane(), &scheme), Err(SdError::UncoloredElement { .. })));
    }

    #[test]
    fn parse_render_round_trip() {
        for s in ["C2", "C2(C3)(N3)(O2)", "C3(=O2)(C1(C3))", "aC(:aC)(:aC(H_C))"] {
            let t = SignatureTree::parse(s).unwrap();
            assert_eq!(SignatureTree::parse(&t.render()).unwrap().render(), t.render());
        }
        assert!(SignatureTree::parse("C2(").is_err());
        assert!(SignatureTree::parse("").is_err());
    }

    #[test]
    fn sd_estimate() {
        let model = SdModel::new("P").with(1, "s", 1.5);
        let counts = BTreeMap::from([(1, DescriptorVector::from_pairs([("s", 2)]))]);
        assert_eq!(estimate_sd(&model, &counts).unwrap(), 3.0);
        assert_eq!(estimate_sd(&model, &BTreeMap::new()), Err(SdError::MissingHeight(1)));
        assert_eq!(estimate_sd(&SdModel::new("P"), &counts).unwrap(), 0.0);
    }
}
