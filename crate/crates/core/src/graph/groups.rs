//! Group-contribution building blocks and decomposition of a graph into them.

use std::collections::{BTreeSet, HashMap};

use super::{BondType, GraphError, Hybridization, MolecularGraph, VertexColor};
use crate::descriptor::DescriptorVector;

/// Whether an open bond of a fragment joins the aliphatic or aromatic network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttachmentKind {
    Aliphatic,
    Aromatic,
}

impl AttachmentKind {
    pub fn bond(self) -> BondType {
        match self {
            AttachmentKind::Aliphatic => BondType::Single,
            AttachmentKind::Aromatic => BondType::Aromatic,
        }
    }
}

/// One open bond on a fragment atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Attachment {
    pub atom: usize,
    pub kind: AttachmentKind,
}

/// A connected group of heavy atoms with open attachment points.
///
/// Each atom's `open_valence` is its non-H degree in a finished molecule, so
/// the free slots on an atom are `open_valence` minus its internal bonds.
/// Aromatic atoms fill aromatic slots first (two aromatic ring bonds in all);
/// the rest are single aliphatic bonds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    atoms: Vec<VertexColor>,
    bonds: Vec<(usize, usize, BondType)>,
}

impl Fragment {
    pub fn new(atoms: Vec<VertexColor>, bonds: Vec<(usize, usize, BondType)>) -> Result<Self, String> {
        if atoms.is_empty() {
            return Err("fragment has no atoms".into());
        }
        let n = atoms.len();
        let mut seen = BTreeSet::new();
        let mut degree = vec![0u32; n];
        for &(a, b, _) in &bonds {
            if a >= n || b >= n {
                return Err(format!("bond {a}-{b} out of range"));
            }
            if a == b {
                return Err(format!("self-loop on atom {a}"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(format!("duplicate bond {a}-{b}"));
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        for (i, atom) in atoms.iter().enumerate() {
            if degree[i] > atom.open_valence {
                return Err(format!("atom {i} has {} internal bonds but open valence {}", degree[i], atom.open_valence));
            }
        }
        let frag = Self { atoms, bonds };
        if !frag.is_connected() {
            return Err("fragment is disconnected".into());
        }
        for i in 0..n {
            frag.check_atom_valence(i)?;
        }
        Ok(frag)
    }

    /// Single-atom fragment.
    pub fn atom(color: VertexColor) -> Self {
        Self { atoms: vec![color], bonds: Vec::new() }
    }

    pub fn atoms(&self) -> &[VertexColor] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[(usize, usize, BondType)] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    fn is_connected(&self) -> bool {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b, _) in &self.bonds {
                let w = if a == v { b } else if b == v { a } else { continue };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn internal(&self, atom: usize) -> impl Iterator<Item = BondType> + '_ {
        self.bonds.iter().filter(move |&&(a, b, _)| a == atom || b == atom).map(|&(_, _, t)| t)
    }

    /// Free (aliphatic, aromatic) slots on one atom.
    pub fn free_slots(&self, atom: usize) -> (u32, u32) {
        let c = &self.atoms[atom];
        let internal: Vec<BondType> = self.internal(atom).collect();
        let free = c.open_valence - internal.len() as u32;
        let arom = if c.hybridization == Hybridization::Aromatic {
            let inner = internal.iter().filter(|&&t| t == BondType::Aromatic).count() as u32;
            2u32.saturating_sub(inner).min(free)
        } else {
            0
        };
        (free - arom, arom)
    }

    /// All open bonds, ordered by atom then kind.
    pub fn attachments(&self) -> Vec<Attachment> {
        let mut out = Vec::new();
        for atom in 0..self.atoms.len() {
            let (ali, arom) = self.free_slots(atom);
            out.extend((0..ali).map(|_| Attachment { atom, kind: AttachmentKind::Aliphatic }));
            out.extend((0..arom).map(|_| Attachment { atom, kind: AttachmentKind::Aromatic }));
        }
        out
    }

    /// Total (aliphatic, aromatic) open bonds.
    pub fn valences(&self) -> (u32, u32) {
        (0..self.atoms.len()).fold((0, 0), |(a, r), i| {
            let (x, y) = self.free_slots(i);
            (a + x, r + y)
        })
    }

    fn check_atom_valence(&self, atom: usize) -> Result<(), String> {
        let c = &self.atoms[atom];
        let (ali, arom) = self.free_slots(atom);
        let half: u32 = self.internal(atom).map(BondType::half_units).sum::<u32>()
            + ali * BondType::Single.half_units()
            + arom * BondType::Aromatic.half_units()
            + 2 * c.attached_hydrogens;
        let allowed = super::element_info(&c.element).map(|e| e.valences).unwrap_or(&[]);
        if !half.is_multiple_of(2) || !allowed.contains(&(half / 2)) {
            return Err(format!(
                "atom {atom} ({}) would carry bond-order sum {} once attached",
                c.element,
                f64::from(half) / 2.0
            ));
        }
        Ok(())
    }
}

/// A group-contribution group: counting data plus an optional structural pattern.
///
/// Groups without a pattern can be counted and checked but not decomposed into
/// or assembled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub name: String,
    pub phi_ali: u32,
    pub phi_arom: u32,
    pub aromatic_atom_count: u32,
    pub rho: u32,
    pub pattern: Option<Fragment>,
}

impl Group {
    /// Aliphatic group with no pattern.
    pub fn simple(name: &str, phi: u32) -> Self {
        Self { name: name.to_string(), phi_ali: phi, phi_arom: 0, aromatic_atom_count: 0, rho: 0, pattern: None }
    }

    pub fn with_pattern(mut self, pattern: Fragment) -> Self {
        self.pattern = Some(pattern);
        self
    }

    /// Total valence Φ.
    pub fn phi(&self) -> u32 {
        self.phi_ali + self.phi_arom
    }

    pub fn is_aromatic(&self) -> bool {
        self.aromatic_atom_count > 0
    }

    fn validate(&self) -> Result<(), GraphError> {
        let bad = |detail: String| GraphError::InvalidGroup { name: self.name.clone(), detail };
        if self.name.is_empty() || self.name.contains(|c: char| c.is_whitespace() || c == ',' || c == '=' || c == ';') {
            return Err(bad("name must be non-empty without whitespace, ',', '=' or ';'".into()));
        }
        if self.aromatic_atom_count == 0 && (self.phi_arom != 0 || self.rho != 0) {
            return Err(bad("non-aromatic group must have phi_arom = 0 and rho = 0".into()));
        }
        if let Some(p) = &self.pattern {
            let (ali, arom) = p.valences();
            if (ali, arom) != (self.phi_ali, self.phi_arom) {
                return Err(bad(format!(
                    "pattern has {ali} aliphatic and {arom} aromatic open bonds, declared {} and {}",
                    self.phi_ali, self.phi_arom
                )));
            }
            let aromatic_atoms = p.atoms().iter().filter(|a| a.is_aromatic()).count() as u32;
            if aromatic_atoms != self.aromatic_atom_count {
                return Err(bad(format!(
                    "pattern has {aromatic_atoms} aromatic atoms, declared {}",
                    self.aromatic_atom_count
                )));
            }
        }
        Ok(())
    }
}

/// An ordered set of uniquely named groups.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupLibrary {
    groups: Vec<Group>,
    index: HashMap<String, usize>,
}

impl GroupLibrary {
    pub fn new(groups: Vec<Group>) -> Result<Self, GraphError> {
        let mut index = HashMap::new();
        for (i, g) in groups.iter().enumerate() {
            g.validate()?;
            if index.insert(g.name.clone(), i).is_some() {
                return Err(GraphError::DuplicateGroup(g.name.clone()));
            }
        }
        Ok(Self { groups, index })
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn get(&self, name: &str) -> Option<&Group> {
        self.index.get(name).map(|&i| &self.groups[i])
    }

    pub fn require(&self, name: &str) -> Result<&Group, GraphError> {
        self.get(name).ok_or_else(|| GraphError::UnknownGroup(name.to_string()))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Errors on the first key of `n` not in the library.
    pub fn check_keys(&self, n: &DescriptorVector) -> Result<(), GraphError> {
        match n.keys().find(|k| !self.index.contains_key(*k)) {
            Some(k) => Err(GraphError::UnknownGroup(k.to_string())),
            None => Ok(()),
        }
    }
}

const COVER_CAP: usize = 10_000;

#[derive(Debug, Clone)]
struct Embedding {
    group: usize,
    vertices: Vec<usize>,
}

fn atom_matches(p: &VertexColor, v: &VertexColor) -> bool {
    p.element == v.element
        && p.open_valence == v.open_valence
        && p.attached_hydrogens == v.attached_hydrogens
        && p.hybridization == v.hybridization
}

fn embeddings(g: &MolecularGraph, group: usize, frag: &Fragment) -> Vec<Embedding> {
    let k = frag.atom_count();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; g.vertex_count()];
    extend(g, frag, 0, &mut map, &mut used, &mut found);
    found.into_iter().map(|vertices| Embedding { group, vertices }).collect()
}

fn extend(
    g: &MolecularGraph,
    frag: &Fragment,
    next: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    found: &mut BTreeSet<Vec<usize>>,
) {
    if next == frag.atom_count() {
        if embedding_is_valid(g, frag, map) {
            let mut set = map.clone();
            set.sort_unstable();
            found.insert(set);
        }
        return;
    }
    for v in 0..g.vertex_count() {
        if used[v] || !atom_matches(&frag.atoms()[next], g.vertex(v)) {
            continue;
        }
        let consistent = frag.bonds().iter().all(|&(a, b, t)| {
            let other = if a == next { b } else if b == next { a } else { return true };
            if other >= next {
                return true;
            }
            g.bond_between(v, map[other]) == Some(t)
        });
        if !consistent {
            continue;
        }
        map[next] = v;
        used[v] = true;
        extend(g, frag, next + 1, map, used, found);
        used[v] = false;
        map[next] = usize::MAX;
    }
}

/// Induced match with external bonds of the expected kinds.
fn embedding_is_valid(g: &MolecularGraph, frag: &Fragment, map: &[usize]) -> bool {
    let inside = |w: usize| map.iter().position(|&m| m == w);
    for (i, &v) in map.iter().enumerate() {
        let (ali, arom) = frag.free_slots(i);
        let (mut ext_ali, mut ext_arom) = (0, 0);
        for &(w, bond) in g.neighbors(v) {
            match inside(w) {
                Some(j) => {
                    let declared = frag.bonds().iter().any(|&(a, b, _)| (a == i && b == j) || (a == j && b == i));
                    if !declared {
                        return false;
                    }
                }
                None => match bond {
                    BondType::Aromatic => ext_arom += 1,
                    BondType::Single => ext_ali += 1,
                    _ => return false,
                },
            }
        }
        if (ext_ali, ext_arom) != (ali, arom) {
            return false;
        }
    }
    true
}

struct CoverSearch<'a> {
    lib: &'a GroupLibrary,
    by_vertex: Vec<Vec<usize>>,
    embeddings: Vec<Embedding>,
    covered: Vec<bool>,
    chosen: Vec<usize>,
    results: BTreeSet<Vec<String>>,
    explored: usize,
}

impl CoverSearch<'_> {
    fn run(&mut self) {
        if self.explored >= COVER_CAP {
            return;
        }
        let Some(v) = self.covered.iter().position(|&c| !c) else {
            self.explored += 1;
            let mut names: Vec<String> =
                self.chosen.iter().map(|&e| self.lib.groups()[self.embeddings[e].group].name.clone()).collect();
            names.sort();
            self.results.insert(names);
            return;
        };
        for idx in 0..self.by_vertex[v].len() {
            let e = self.by_vertex[v][idx];
            if self.embeddings[e].vertices.iter().any(|&w| self.covered[w]) {
                continue;
            }
            for &w in &self.embeddings[e].vertices {
                self.covered[w] = true;
            }
            self.chosen.push(e);
            self.run();
            self.chosen.pop();
            for &w in &self.embeddings[e].vertices {
                self.covered[w] = false;
            }
        }
    }
}

fn all_covers(g: &MolecularGraph, lib: &GroupLibrary) -> BTreeSet<Vec<String>> {
    let mut embs: Vec<Embedding> = Vec::new();
    for (i, group) in lib.groups().iter().enumerate() {
        if let Some(p) = &group.pattern {
            embs.extend(embeddings(g, i, p));
        }
    }
    // Largest fragments first, then library order.
    embs.sort_by(|a, b| b.vertices.len().cmp(&a.vertices.len()).then(a.group.cmp(&b.group)));
    let mut by_vertex = vec![Vec::new(); g.vertex_count()];
    for (i, e) in embs.iter().enumerate() {
        for &v in &e.vertices {
            by_vertex[v].push(i);
        }
    }
    let mut s = CoverSearch {
        lib,
        by_vertex,
        embeddings: embs,
        covered: vec![false; g.vertex_count()],
        chosen: Vec::new(),
        results: BTreeSet::new(),
        explored: 0,
    };
    s.run();
    s.results
}

fn to_counts(names: &[String]) -> DescriptorVector {
    names.iter().map(|n| (n.clone(), 1)).collect()
}

/// Exact cover of every heavy atom by non-overlapping group patterns.
///
/// When several covers exist, the one whose sorted list of group names is
/// lexicographically smallest is returned.
pub fn decompose_into_groups(g: &MolecularGraph, lib: &GroupLibrary) -> Result<DescriptorVector, GraphError> {
    let covers = all_covers(g, lib);
    covers.iter().next().map(|c| to_counts(c)).ok_or(GraphError::NoCover)
}

/// Like [`decompose_into_groups`] but fails with `AmbiguousCover` when covers
/// disagree on the group counts.
pub fn decompose_unique(g: &MolecularGraph, lib: &GroupLibrary) -> Result<DescriptorVector, GraphError> {
    let covers = all_covers(g, lib);
    match covers.len() {
        0 => Err(GraphError::NoCover),
        1 => Ok(to_counts(covers.iter().next().expect("one cover"))),
        k => Err(GraphError::AmbiguousCover(k)),
    }
}
