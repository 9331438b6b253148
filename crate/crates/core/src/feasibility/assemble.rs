//! Assembly of explicit graphs from a group multiset by pairing open bonds.

use std::collections::BTreeMap;

use super::FeasibilityError;
use crate::descriptor::DescriptorVector;
use crate::graph::{build_graph, canonical_label, AttachmentKind, BondType, GroupLibrary, MolecularGraph, RingCounts, VertexColor};

/// Distinct structures, sorted by canonical label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    pub structures: Vec<MolecularGraph>,
    pub labels: Vec<String>,
    /// True when the search stopped before proving the list complete.
    pub truncated: bool,
}

const NODE_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy)]
struct Stub {
    atom: usize,
    instance: usize,
    kind: AttachmentKind,
}

struct Search {
    atoms: Vec<VertexColor>,
    instance_group: Vec<usize>,
    stubs: Vec<Stub>,
    internal: Vec<(usize, usize, BondType)>,
    used: Vec<bool>,
    external: Vec<(usize, usize, BondType)>,
    touched: Vec<u32>,
    found: BTreeMap<String, MolecularGraph>,
    limit: usize,
    nodes: usize,
    truncated: bool,
}

impl Search {
    fn bonded(&self, a: usize, b: usize) -> bool {
        self.internal.iter().chain(&self.external).any(|&(x, y, _)| (x == a && y == b) || (x == b && y == a))
    }

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    /// False if some component is already closed off from the rest.
    fn connectable(&self) -> bool {
        let n = self.atoms.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for &(a, b, _) in self.internal.iter().chain(&self.external) {
            let (ra, rb) = (Self::find(&mut parent, a), Self::find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut open = vec![false; n];
        for (i, s) in self.stubs.iter().enumerate() {
            if !self.used[i] {
                let r = Self::find(&mut parent, s.atom);
                open[r] = true;
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&x| Self::find(&mut parent, x) == x).collect();
        roots.len() == 1 || roots.iter().all(|&r| open[r])
    }

    fn run(&mut self) {
        if self.truncated {
            return;
        }
        self.nodes += 1;
        if self.nodes > NODE_CAP {
            self.truncated = true;
            return;
        }
        let Some(s) = self.used.iter().position(|u| !u) else {
            self.finish();
            return;
        };
        let stub = self.stubs[s];
        self.used[s] = true;
        let mut tried_atoms: Vec<usize> = Vec::new();
        let mut tried_fresh: Vec<(usize, usize)> = Vec::new();
        for t in s + 1..self.stubs.len() {
            let other = self.stubs[t];
            if self.used[t] || other.kind != stub.kind || other.instance == stub.instance {
                continue;
            }
            if tried_atoms.contains(&other.atom) || self.bonded(stub.atom, other.atom) {
                continue;
            }
            // Untouched instances of one group are interchangeable.
            let fresh = self.touched[other.instance] == 0;
            let group = self.instance_group[other.instance];
            if fresh && tried_fresh.iter().any(|&(g, i)| g == group && i != other.instance) {
                continue;
            }
            tried_atoms.push(other.atom);
            if fresh {
                tried_fresh.push((group, other.instance));
            }

            self.used[t] = true;
            self.touched[stub.instance] += 1;
            self.touched[other.instance] += 1;
            self.external.push((stub.atom, other.atom, stub.kind.bond()));
            if self.connectable() {
                self.run();
            }
            self.external.pop();
            self.touched[other.instance] -= 1;
            self.touched[stub.instance] -= 1;
            self.used[t] = false;
            if self.truncated {
                break;
            }
        }
        self.used[s] = false;
    }

    fn finish(&mut self) {
        let edges: Vec<_> = self.internal.iter().chain(&self.external).copied().collect();
        let Some(aromatic) = aromatic_rings(self.atoms.len(), &edges) else {
            return;
        };
        let cycles = edges.len() + 1 - self.atoms.len();
        let rings = RingCounts::new(aromatic, cycles - aromatic);
        let Ok(g) = build_graph(self.atoms.clone(), &edges, rings) else {
            return;
        };
        let label = canonical_label(&g);
        if self.found.contains_key(&label) {
            return;
        }
        if self.found.len() == self.limit {
            self.truncated = true;
            return;
        }
        self.found.insert(label, g);
    }
}

/// Number of aromatic rings if every component of the aromatic-bond subgraph
/// is a simple six-membered cycle; `None` otherwise.
fn aromatic_rings(n: usize, edges: &[(usize, usize, BondType)]) -> Option<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, t) in edges {
        if t == BondType::Aromatic {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    let mut rings = 0;
    for start in 0..n {
        if seen[start] || adj[start].is_empty() {
            continue;
        }
        let mut size = 0;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            size += 1;
            if adj[v].len() != 2 {
                return None;
            }
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if size != 6 {
            return None;
        }
        rings += 1;
    }
    Some(rings)
}

/// Connected graphs obtained by pairing open bonds of the group instances in
/// `n`, deduplicated up to isomorphism. Open bonds pair only with the same
/// kind, never within one group instance, and never twice between one pair of
/// atoms. Aromatic bonds must close into six-membered rings.
pub fn assemble_structures(
    n: &DescriptorVector,
    lib: &GroupLibrary,
    max_results: usize,
) -> Result<Assembly, FeasibilityError> {
    lib.check_keys(n).map_err(|_| {
        FeasibilityError::UnknownGroup(n.keys().find(|k| lib.get(k).is_none()).unwrap_or_default().to_string())
    })?;
    let mut s = Search {
        atoms: Vec::new(),
        instance_group: Vec::new(),
        stubs: Vec::new(),
        internal: Vec::new(),
        used: Vec::new(),
        external: Vec::new(),
        touched: Vec::new(),
        found: BTreeMap::new(),
        limit: max_results,
        nodes: 0,
        truncated: false,
    };
    for (gi, group) in lib.groups().iter().enumerate() {
        let count = n.get(&group.name);
        if count == 0 {
            continue;
        }
        let frag = group.pattern.as_ref().ok_or_else(|| FeasibilityError::MissingPattern(group.name.clone()))?;
        for _ in 0..count {
            let instance = s.instance_group.len();
            s.instance_group.push(gi);
            let base = s.atoms.len();
            s.atoms.extend(frag.atoms().iter().cloned());
            s.internal.extend(frag.bonds().iter().map(|&(a, b, t)| (base + a, base + b, t)));
            s.stubs.extend(frag.attachments().into_iter().map(|at| Stub { atom: base + at.atom, instance, kind: at.kind }));
        }
    }
    if s.atoms.is_empty() {
        return Err(FeasibilityError::NoAssembly);
    }
    s.used = vec![false; s.stubs.len()];
    s.touched = vec![0; s.instance_group.len()];
    if max_results > 0 {
        s.run();
    } else {
        s.truncated = true;
    }
    if s.found.is_empty() && !s.truncated {
        return Err(FeasibilityError::NoAssembly);
    }
    let (labels, structures) = s.found.into_iter().unzip();
    Ok(Assembly { structures, labels, truncated: s.truncated })
}
