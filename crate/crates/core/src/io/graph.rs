//! Graph files (`atoms N edges M rings A L`, then atom and edge lines) and
//! fragment files (`fragment NAME` blocks with `atoms N edges M` headers).

use std::fmt::Write;

use super::{content_lines, field, IoError};
use crate::graph::{build_graph, BondType, Fragment, Hybridization, MolecularGraph, RingCounts, VertexColor};

type Body = (Vec<VertexColor>, Vec<(usize, usize, BondType)>);

/// Reads `n` atom lines `idx element open_valence h tag` and `m` edge lines `v w order`.
fn parse_body<'a>(
    file: &str,
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    header_line: usize,
    n: usize,
    m: usize,
) -> Result<Body, IoError> {
    let mut atoms = Vec::with_capacity(n);
    for k in 0..n {
        let (ln, l) = lines.next().ok_or_else(|| IoError::parse(file, header_line, format!("expected {n} atom lines")))?;
        let mut t = l.split_whitespace();
        let idx: usize = field(file, ln, "atom index", t.next())?;
        if idx != k + 1 {
            return Err(IoError::parse(file, ln, format!("atom index {idx}, expected {}", k + 1)));
        }
        let el: String = field(file, ln, "element", t.next())?;
        let ov: u32 = field(file, ln, "open valence", t.next())?;
        let h: u32 = field(file, ln, "hydrogen count", t.next())?;
        let tag: Hybridization = field(file, ln, "hybridization tag", t.next())?;
        if t.next().is_some() {
            return Err(IoError::parse(file, ln, "trailing fields"));
        }
        atoms.push(VertexColor::new(&el, ov, h, tag).map_err(|e| IoError::parse(file, ln, e.to_string()))?);
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, l) = lines.next().ok_or_else(|| IoError::parse(file, header_line, format!("expected {m} edge lines")))?;
        let mut t = l.split_whitespace();
        let v: usize = field(file, ln, "vertex", t.next())?;
        let w: usize = field(file, ln, "vertex", t.next())?;
        let b: BondType = field(file, ln, "bond order", t.next())?;
        if v == 0 || w == 0 || v > n || w > n {
            return Err(IoError::parse(file, ln, format!("edge {v}-{w} outside 1..={n}")));
        }
        if t.next().is_some() {
            return Err(IoError::parse(file, ln, "trailing fields"));
        }
        edges.push((v - 1, w - 1, b));
    }
    Ok((atoms, edges))
}

fn expect_word(file: &str, ln: usize, got: Option<&str>, want: &str) -> Result<(), IoError> {
    match got {
        Some(w) if w == want => Ok(()),
        other => Err(IoError::parse(file, ln, format!("expected `{want}`, found `{}`", other.unwrap_or("")))),
    }
}

pub fn parse_graph(file: &str, text: &str) -> Result<MolecularGraph, IoError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| IoError::parse(file, 1, "empty graph file"))?;
    let mut t = header.split_whitespace();
    expect_word(file, ln, t.next(), "atoms")?;
    let n: usize = field(file, ln, "atom count", t.next())?;
    expect_word(file, ln, t.next(), "edges")?;
    let m: usize = field(file, ln, "edge count", t.next())?;
    expect_word(file, ln, t.next(), "rings")?;
    let a: usize = field(file, ln, "aromatic ring count", t.next())?;
    let l: usize = field(file, ln, "aliphatic ring count", t.next())?;
    let (atoms, edges) = parse_body(file, &mut lines, ln, n, m)?;
    if let Some((extra, _)) = lines.next() {
        return Err(IoError::parse(file, extra, "unexpected content after the last edge"));
    }
    build_graph(atoms, &edges, RingCounts::new(a, l)).map_err(|e| IoError::parse(file, ln, e.to_string()))
}

fn write_body(out: &mut String, atoms: &[VertexColor], edges: &[(usize, usize, BondType)]) {
    for (i, c) in atoms.iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {} {}", i + 1, c.element, c.open_valence, c.attached_hydrogens, c.hybridization.as_str());
    }
    for &(a, b, t) in edges {
        let _ = writeln!(out, "{} {} {}", a + 1, b + 1, t.token());
    }
}

pub fn write_graph(g: &MolecularGraph) -> String {
    let r = g.rings();
    let mut out = format!("atoms {} edges {} rings {} {}\n", g.vertex_count(), g.edge_count(), r.aromatic, r.aliphatic);
    let edges: Vec<_> = g.edges().iter().map(|e| (e.a, e.b, e.bond)).collect();
    write_body(&mut out, g.vertices(), &edges);
    out
}

/// Named fragments in file order.
pub fn parse_fragments(file: &str, text: &str) -> Result<Vec<(String, Fragment)>, IoError> {
    let mut lines = content_lines(text).peekable();
    let mut out: Vec<(String, Fragment)> = Vec::new();
    while let Some((ln, l)) = lines.next() {
        let mut t = l.split_whitespace();
        expect_word(file, ln, t.next(), "fragment")?;
        let name: String = field(file, ln, "fragment name", t.next())?;
        if out.iter().any(|(n, _)| *n == name) {
            return Err(IoError::DuplicateName { file: file.to_string(), line: ln, name });
        }
        let (hl, header) = lines.next().ok_or_else(|| IoError::parse(file, ln, "missing atoms header"))?;
        let mut h = header.split_whitespace();
        expect_word(file, hl, h.next(), "atoms")?;
        let n: usize = field(file, hl, "atom count", h.next())?;
        expect_word(file, hl, h.next(), "edges")?;
        let m: usize = field(file, hl, "edge count", h.next())?;
        let (atoms, edges) = parse_body(file, &mut lines, hl, n, m)?;
        let frag = Fragment::new(atoms, edges).map_err(|e| IoError::parse(file, ln, format!("fragment {name}: {e}")))?;
        out.push((name, frag));
    }
    Ok(out)
}

pub fn write_fragments<'a>(fragments: impl IntoIterator<Item = (&'a str, &'a Fragment)>) -> String {
    let mut out = String::new();
    for (name, f) in fragments {
        let _ = writeln!(out, "fragment {name}");
        let _ = writeln!(out, "atoms {} edges {}", f.atom_count(), f.bonds().len());
        write_body(&mut out, f.atoms(), f.bonds());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROPANE: &str = "# propane\natoms 3 edges 2 rings 0 0\n1 C 1 3 sp3\n2 C 2 2 sp3\n3 C 1 3 sp3\n1 2 1\n2 3 1\n";

    #[test]
    fn graph_round_trip() {
        let g = parse_graph("propane", PROPANE).unwrap();
        assert_eq!(g.vertex_count(), 3);
        let again = parse_graph("again", &write_graph(&g)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn graph_errors_carry_lines() {
        let bad = PROPANE.replace("2 3 1", "2 9 1");
        match parse_graph("f", &bad) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_graph("f", ""), Err(IoError::Parse { .. })));
        let valence = PROPANE.replace("2 C 2 2 sp3", "2 C 2 3 sp3");
        assert!(matches!(parse_graph("f", &valence), Err(IoError::Parse { .. })));
    }

    #[test]
    fn fragments_round_trip() {
        let text = "fragment CH3\natoms 1 edges 0\n1 C 1 3 sp3\nfragment CH2OH\natoms 2 edges 1\n1 C 2 2 sp3\n2 O 1 1 sp3\n1 2 1\n";
        let frags = parse_fragments("f", text).unwrap();
        assert_eq!(frags.len(), 2);
        assert_eq!(frags[1].1.valences(), (1, 0));
        let again = parse_fragments("g", &write_fragments(frags.iter().map(|(n, f)| (n.as_str(), f)))).unwrap();
        assert_eq!(frags, again);
    }
}
