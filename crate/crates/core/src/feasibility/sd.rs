//! Signature-count constraints: handshaking lemma, coloring-sequence balance,
//! self-sequence parity, and parent availability.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{write_lines, CheckLine, FeasibilityError};
use crate::descriptor::DescriptorVector;
use crate::graph::{BondType, RingCounts};
use crate::sd::SignatureTree;

/// Per-signature data derived from the signature strings of one height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdConstraintData {
    pub height: u32,
    pub signatures: Vec<String>,
    pub root_color: Vec<String>,
    /// Sum of the root's bond orders, aromatic counted as 1. Signature d is in S_k for k = class[d].
    pub class: Vec<u32>,
    pub double_bonds: Vec<u32>,
    pub triple_bonds: Vec<u32>,
    /// β_{d,o,o'}: root color to child color sequences.
    pub beta: Vec<BTreeMap<(String, String), u32>>,
    /// ω_{d,o}: children of color o whose degree is at least the root's.
    pub omega: Vec<BTreeMap<String, u32>>,
    pub rings: RingCounts,
}

fn bond_order(b: Option<BondType>) -> u32 {
    match b {
        None | Some(BondType::Single) | Some(BondType::Aromatic) => 1,
        Some(BondType::Double) => 2,
        Some(BondType::Triple) => 3,
    }
}

impl SdConstraintData {
    pub fn new(height: u32, signatures: &[String], rings: RingCounts) -> Result<Self, FeasibilityError> {
        let mut trees = Vec::with_capacity(signatures.len());
        for s in signatures {
            let tree =
                SignatureTree::parse(s).map_err(|_| FeasibilityError::UnknownSignature(s.clone()))?;
            if height == 0 || tree.depth() > height as usize {
                return Err(FeasibilityError::HeightMismatch { signature: s.clone(), height });
            }
            trees.push(tree);
        }

        // Degree of a color, when every signature rooted at it agrees.
        let mut color_degree: BTreeMap<&str, Option<u32>> = BTreeMap::new();
        for t in &trees {
            let d = t.children.len() as u32;
            color_degree
                .entry(t.label.as_str())
                .and_modify(|e| {
                    if *e != Some(d) {
                        *e = None;
                    }
                })
                .or_insert(Some(d));
        }

        let mut data = Self {
            height,
            signatures: signatures.to_vec(),
            root_color: Vec::new(),
            class: Vec::new(),
            double_bonds: Vec::new(),
            triple_bonds: Vec::new(),
            beta: Vec::new(),
            omega: Vec::new(),
            rings,
        };
        for t in &trees {
            let root_degree = t.children.len() as u32;
            data.root_color.push(t.label.clone());
            data.class.push(t.children.iter().map(|(b, _)| bond_order(*b)).sum());
            data.double_bonds.push(t.children.iter().filter(|(b, _)| *b == Some(BondType::Double)).count() as u32);
            data.triple_bonds.push(t.children.iter().filter(|(b, _)| *b == Some(BondType::Triple)).count() as u32);
            let mut beta = BTreeMap::new();
            let mut omega = BTreeMap::new();
            for (_, child) in &t.children {
                *beta.entry((t.label.clone(), child.label.clone())).or_insert(0) += 1;
                let degree = if height >= 2 {
                    Some(1 + child.children.len() as u32)
                } else {
                    color_degree.get(child.label.as_str()).copied().flatten()
                };
                if degree.is_some_and(|d| d >= root_degree) {
                    *omega.entry(child.label.clone()).or_insert(0) += 1;
                }
            }
            data.beta.push(beta);
            data.omega.push(omega);
        }
        Ok(data)
    }

    /// Uses the keys of `n` as the signature set.
    pub fn from_counts(height: u32, n: &DescriptorVector, rings: RingCounts) -> Result<Self, FeasibilityError> {
        let sigs: Vec<String> = n.keys().map(str::to_string).collect();
        Self::new(height, &sigs, rings)
    }

    fn index(&self, sig: &str) -> Option<usize> {
        self.signatures.iter().position(|s| s == sig)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaCheck {
    pub from: String,
    pub to: String,
    /// Σ β_{d,o,o'} n_d
    pub forward: i64,
    /// Σ β_{d,o',o} n_d
    pub backward: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentCheck {
    pub signature: String,
    pub child_color: String,
    pub required: i64,
    pub available: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdFeasibilityReport {
    /// Σ_k k |S_k| and 2[Σ n + ½B_D1 + B_D2 + B_T1 − 1 + N_R], both doubled out to integers.
    pub handshake: (i64, i64),
    pub beta: Vec<BetaCheck>,
    /// (color, Σ β_{d,o,o} n_d)
    pub parity: Vec<(String, i64)>,
    pub parent: Vec<ParentCheck>,
}

impl SdFeasibilityReport {
    pub fn handshake_ok(&self) -> bool {
        self.handshake.0 == self.handshake.1
    }

    pub fn beta_ok(&self) -> bool {
        self.beta.iter().all(|b| b.forward == b.backward)
    }

    pub fn parity_ok(&self) -> bool {
        self.parity.iter().all(|(_, t)| t % 2 == 0)
    }

    pub fn parent_ok(&self) -> bool {
        self.parent.iter().all(|p| p.required <= p.available)
    }

    pub fn ok(&self) -> bool {
        self.handshake_ok() && self.beta_ok() && self.parity_ok() && self.parent_ok()
    }

    pub fn lines(&self) -> Vec<CheckLine> {
        let mut out = vec![CheckLine::new("handshake", self.handshake_ok(), self.handshake.0 - self.handshake.1)];
        for b in &self.beta {
            out.push(CheckLine::new(format!("beta[{}->{}]", b.from, b.to), b.forward == b.backward, b.forward - b.backward));
        }
        for (o, t) in &self.parity {
            out.push(CheckLine::new(format!("parity[{o}->{o}]"), t % 2 == 0, t % 2));
        }
        for p in &self.parent {
            out.push(CheckLine::new(
                format!("parent[{}:{}]", p.signature, p.child_color),
                p.required <= p.available,
                p.available - p.required,
            ));
        }
        out
    }
}

impl fmt::Display for SdFeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_lines(f, &self.lines())
    }
}

/// Parent availability is checked per signature: a root of color o' with
/// ω ≥ 2 qualifying children of color o needs ω signatures rooted at o with a
/// child of color o'.
pub fn check_sd_feasibility(
    n: &DescriptorVector,
    data: &SdConstraintData,
) -> Result<SdFeasibilityReport, FeasibilityError> {
    let mut counts = vec![0i64; data.signatures.len()];
    for (sig, c) in n.iter() {
        let i = data.index(sig).ok_or_else(|| FeasibilityError::UnknownSignature(sig.to_string()))?;
        counts[i] = i64::from(c);
    }

    let total: i64 = counts.iter().sum();
    let mut lhs = 0;
    let (mut bd1, mut bd2, mut bt1) = (0, 0, 0);
    for (i, &c) in counts.iter().enumerate() {
        lhs += i64::from(data.class[i]) * c;
        match data.double_bonds[i] {
            1 => bd1 += c,
            2 => bd2 += c,
            _ => {}
        }
        if data.triple_bonds[i] == 1 {
            bt1 += c;
        }
    }
    let rings = (data.rings.aromatic + data.rings.aliphatic) as i64;
    let rhs = 2 * total + bd1 + 2 * bd2 + 2 * bt1 - 2 + 2 * rings;

    let mut seq: BTreeMap<(String, String), i64> = BTreeMap::new();
    for (i, beta) in data.beta.iter().enumerate() {
        for (pair, &b) in beta {
            *seq.entry(pair.clone()).or_insert(0) += i64::from(b) * counts[i];
        }
    }
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    let mut parity = Vec::new();
    for ((o, p), &t) in &seq {
        if o == p {
            parity.push((o.clone(), t));
        } else {
            pairs.insert(if o < p { (o.clone(), p.clone()) } else { (p.clone(), o.clone()) });
        }
    }
    let beta = pairs
        .into_iter()
        .map(|(o, p)| BetaCheck {
            forward: seq.get(&(o.clone(), p.clone())).copied().unwrap_or(0),
            backward: seq.get(&(p.clone(), o.clone())).copied().unwrap_or(0),
            from: o,
            to: p,
        })
        .collect();

    let mut parent = Vec::new();
    for (i, omega) in data.omega.iter().enumerate() {
        if counts[i] == 0 {
            continue;
        }
        let root = &data.root_color[i];
        for (o, &w) in omega {
            if w < 2 {
                continue;
            }
            let available = (0..data.signatures.len())
                .filter(|&j| data.root_color[j] == *o && data.beta[j].contains_key(&(o.clone(), root.clone())))
                .map(|j| counts[j])
                .sum();
            parent.push(ParentCheck {
                signature: data.signatures[i].clone(),
                child_color: o.clone(),
                required: i64::from(w),
                available,
            });
        }
    }

    Ok(SdFeasibilityReport { handshake: (lhs, rhs), beta, parity, parent })
}
