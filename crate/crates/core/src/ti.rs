//! Topological indices of hydrogen-suppressed graphs.
//!
//! δ is the number of non-hydrogen neighbors; every neighbor counts once,
//! aromatic ones included. Higher-order χ sums run over simple paths.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{distance_matrix, MolecularGraph, VertexColor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TiError {
    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(usize),
    #[error("valence delta denominator Z - Z^V - 1 is zero")]
    DivisionByZero,
    #[error("valence delta of vertex {vertex} is {value}, not positive")]
    NonPositiveValenceDelta { vertex: usize, value: f64 },
    #[error("kappa of order {order} is undefined ({reason})")]
    UndefinedKappa { order: u32, reason: String },
    #[error("vertices {0} and {1} are not bonded")]
    NotAnEdge(usize, usize),
}

pub fn wiener_index(g: &MolecularGraph) -> f64 {
    let d = distance_matrix(g);
    let total: u64 = d.iter().flatten().map(|&x| u64::from(x)).sum();
    total as f64 / 2.0
}

fn delta(g: &MolecularGraph, v: usize) -> Result<f64, TiError> {
    match g.degree(v) {
        0 => Err(TiError::IsolatedVertex(v)),
        d => Ok(d as f64),
    }
}

/// `1 / sqrt(δ_a δ_b)` for a bonded pair.
pub fn edge_ci(g: &MolecularGraph, a: usize, b: usize) -> Result<f64, TiError> {
    if a >= g.vertex_count() || b >= g.vertex_count() || g.bond_between(a, b).is_none() {
        return Err(TiError::NotAnEdge(a, b));
    }
    Ok(1.0 / (delta(g, a)? * delta(g, b)?).sqrt())
}

/// δ^V = Z^V − h for Z ≤ 10, else (Z^V − h) / (Z − Z^V − 1).
pub fn valence_delta(v: &VertexColor) -> Result<f64, TiError> {
    let num = f64::from(v.valence_electrons) - f64::from(v.attached_hydrogens);
    if v.atomic_number <= 10 {
        return Ok(num);
    }
    let den = i64::from(v.atomic_number) - i64::from(v.valence_electrons) - 1;
    if den == 0 {
        return Err(TiError::DivisionByZero);
    }
    Ok(num / den as f64)
}

/// Calls `visit` once per undirected simple path with `len` edges.
fn for_each_path(g: &MolecularGraph, len: usize, mut visit: impl FnMut(&[usize])) {
    let n = g.vertex_count();
    let mut path = Vec::with_capacity(len + 1);
    let mut on_path = vec![false; n];
    for start in 0..n {
        path.push(start);
        on_path[start] = true;
        walk(g, len, &mut path, &mut on_path, &mut visit);
        on_path[start] = false;
        path.pop();
    }
}

fn walk(g: &MolecularGraph, len: usize, path: &mut Vec<usize>, on_path: &mut [bool], visit: &mut impl FnMut(&[usize])) {
    if path.len() == len + 1 {
        // Each path with at least one edge is reached from both ends; keep one.
        if len == 0 || path[0] < path[len] {
            visit(path);
        }
        return;
    }
    let last = *path.last().expect("non-empty path");
    for &(w, _) in g.neighbors(last) {
        if on_path[w] {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        walk(g, len, path, on_path, visit);
        path.pop();
        on_path[w] = false;
    }
}

/// Number of simple paths with `i` edges; `|V|` for `i = 0`.
pub fn path_count(g: &MolecularGraph, i: u32) -> u64 {
    let mut count = 0;
    for_each_path(g, i as usize, |_| count += 1);
    count
}

fn chi_with(g: &MolecularGraph, order: u32, weights: &[f64]) -> f64 {
    let mut total = 0.0;
    for_each_path(g, order as usize, |p| {
        let prod: f64 = p.iter().map(|&v| weights[v]).product();
        total += 1.0 / prod.sqrt();
    });
    total
}

/// Randić connectivity index of the given order.
pub fn chi(g: &MolecularGraph, order: u32) -> Result<f64, TiError> {
    let deltas = (0..g.vertex_count()).map(|v| delta(g, v)).collect::<Result<Vec<_>, _>>()?;
    Ok(chi_with(g, order, &deltas))
}

/// Valence-corrected connectivity index, δ replaced by δ^V.
pub fn chi_valence(g: &MolecularGraph, order: u32) -> Result<f64, TiError> {
    let mut deltas = Vec::with_capacity(g.vertex_count());
    for (vertex, color) in g.vertices().iter().enumerate() {
        let value = valence_delta(color)?;
        if value <= 0.0 {
            return Err(TiError::NonPositiveValenceDelta { vertex, value });
        }
        deltas.push(value);
    }
    Ok(chi_with(g, order, &deltas))
}

/// Extremal path counts (max, min) for a graph with `a` vertices.
pub fn extremal_paths(order: u32, a: u64) -> Option<(f64, f64)> {
    let a = a as f64;
    match order {
        1 => Some((a * (a - 1.0), a - 1.0)),
        2 => Some(((a - 1.0) * (a - 2.0) / 2.0, a - 2.0)),
        3 => {
            let max = if (a as u64).is_multiple_of(2) { (a - 2.0).powi(2) / 4.0 } else { (a - 1.0) * (a - 3.0) / 4.0 };
            Some((max, a - 3.0))
        }
        _ => None,
    }
}

/// Kier shape index of order 1, 2 or 3.
pub fn kappa(g: &MolecularGraph, order: u32) -> Result<f64, TiError> {
    let undefined = |reason: String| TiError::UndefinedKappa { order, reason };
    let a = g.vertex_count() as u64;
    let (max, min) = extremal_paths(order, a).ok_or_else(|| undefined("order must be 1, 2 or 3".into()))?;
    if a < u64::from(order) + 1 {
        return Err(undefined(format!("{a} vertices")));
    }
    let p = path_count(g, order);
    if p == 0 {
        return Err(undefined(format!("no paths of length {order}")));
    }
    let factor = if order == 3 { 4.0 } else { 2.0 };
    Ok(factor * max * min / (p as f64).powi(2))
}

/// All indices for one graph. Entries that are undefined for the graph are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct TiReport {
    pub wiener: f64,
    pub chi: BTreeMap<u32, f64>,
    pub chi_valence: BTreeMap<u32, f64>,
    pub path_counts: BTreeMap<u32, u64>,
    pub kappa: BTreeMap<u32, f64>,
}

pub const REPORT_MAX_ORDER: u32 = 3;

pub fn ti_report(g: &MolecularGraph) -> TiReport {
    let orders = 0..=REPORT_MAX_ORDER;
    TiReport {
        wiener: wiener_index(g),
        chi: orders.clone().filter_map(|i| chi(g, i).ok().map(|x| (i, x))).collect(),
        chi_valence: orders.clone().filter_map(|i| chi_valence(g, i).ok().map(|x| (i, x))).collect(),
        path_counts: orders.map(|i| (i, path_count(g, i))).collect(),
        kappa: (1..=3).filter_map(|i| kappa(g, i).ok().map(|x| (i, x))).collect(),
    }
}

impl fmt::Display for TiReport {
    /// `key=value` lines, reals with six decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wiener={:.6}", self.wiener)?;
        for (i, p) in &self.path_counts {
            writeln!(f, "path_count_{i}={p}")?;
        }
        for (i, x) in &self.chi {
            writeln!(f, "chi_{i}={x:.6}")?;
        }
        for (i, x) in &self.chi_valence {
            writeln!(f, "chi_valence_{i}={x:.6}")?;
        }
        for (i, x) in &self.kappa {
            writeln!(f, "kappa_{i}={x:.6}")?;
        }
        Ok(())
    }
}
