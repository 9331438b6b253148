//! Descriptor vectors, GC and SD model files, and TI assignment files.

use std::fmt::Write;

use super::{content_lines, field, num, IoError};
use crate::descriptor::DescriptorVector;
use crate::feasibility::{NodeType, TiAssignment};
use crate::gc::{Combiner, GcModel, InteractionTerm, Level, Transform};
use crate::graph::BondType;
use crate::sd::SdModel;

/// One `name count` pair per line.
pub fn parse_descriptor_vector(file: &str, text: &str) -> Result<DescriptorVector, IoError> {
    let mut n = DescriptorVector::new();
    let mut seen = Vec::new();
    for (ln, l) in content_lines(text) {
        let mut t = l.split_whitespace();
        let name: String = field(file, ln, "descriptor name", t.next())?;
        let count: u32 = field(file, ln, "count", t.next())?;
        if t.next().is_some() {
            return Err(IoError::parse(file, ln, "trailing fields"));
        }
        if seen.contains(&name) {
            return Err(IoError::DuplicateName { file: file.to_string(), line: ln, name });
        }
        n.set(name.clone(), count);
        seen.push(name);
    }
    Ok(n)
}

pub fn write_descriptor_vector(n: &DescriptorVector) -> String {
    n.iter().map(|(k, c)| format!("{k} {c}\n")).collect()
}

/// Lines: `property NAME`, `transform T`, `group NAME COEF [LEVEL]`,
/// `interaction G G' COMBINER COEF`.
pub fn parse_gc_model(file: &str, text: &str) -> Result<GcModel, IoError> {
    let mut model = GcModel::linear("", Vec::<(String, f64)>::new());
    let mut named = false;
    for (ln, l) in content_lines(text) {
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let mut t = rest.split_whitespace();
        match key {
            "property" => {
                model.property = field(file, ln, "property name", t.next())?;
                named = true;
            }
            "transform" => {
                model.transform = rest.trim().parse::<Transform>().map_err(|e| IoError::parse(file, ln, e.to_string()))?;
            }
            "group" => {
                let name: String = field(file, ln, "group name", t.next())?;
                let coef: f64 = field(file, ln, "coefficient", t.next())?;
                if model.coefficients.insert(name.clone(), coef).is_some() {
                    return Err(IoError::DuplicateName { file: file.to_string(), line: ln, name });
                }
                if let Some(level) = t.next() {
                    let level: Level = level.parse().map_err(|e: crate::gc::GcError| IoError::parse(file, ln, e.to_string()))?;
                    model.levels.insert(name, level);
                }
            }
            "interaction" => {
                let g: String = field(file, ln, "group", t.next())?;
                let g_prime: String = field(file, ln, "group", t.next())?;
                let combiner: Combiner = field(file, ln, "combiner", t.next())?;
                let coefficient: f64 = field(file, ln, "coefficient", t.next())?;
                model.interactions.push(InteractionTerm { g, g_prime, coefficient, combiner });
            }
            other => return Err(IoError::parse(file, ln, format!("unknown keyword `{other}`"))),
        }
        if key != "transform" && t.next().is_some() {
            return Err(IoError::parse(file, ln, "trailing fields"));
        }
    }
    if !named {
        return Err(IoError::parse(file, 1, "model has no `property` line"));
    }
    Ok(model)
}

pub fn write_gc_model(m: &GcModel) -> String {
    let mut out = format!("property {}\ntransform {}\n", m.property, m.transform);
    for (g, c) in &m.coefficients {
        match m.levels.get(g) {
            Some(level) => writeln!(out, "group {g} {} {level}", num(*c)),
            None => writeln!(out, "group {g} {}", num(*c)),
        }
        .expect("write to string");
    }
    for t in &m.interactions {
        let _ = writeln!(out, "interaction {} {} {} {}", t.g, t.g_prime, t.combiner, num(t.coefficient));
    }
    out
}

/// Lines: `property NAME`, `signature HEIGHT SIGNATURE COEF`.
pub fn parse_sd_model(file: &str, text: &str) -> Result<SdModel, IoError> {
    let mut model: Option<SdModel> = None;
    for (ln, l) in content_lines(text) {
        let mut t = l.split_whitespace();
        match t.next() {
            Some("property") => {
                let name: String = field(file, ln, "property name", t.next())?;
                model = Some(SdModel::new(&name));
            }
            Some("signature") => {
                let m = model.take().ok_or_else(|| IoError::parse(file, ln, "`signature` before `property`"))?;
                let h: u32 = field(file, ln, "height", t.next())?;
                let sig: String = field(file, ln, "signature", t.next())?;
                let c: f64 = field(file, ln, "coefficient", t.next())?;
                if m.coefficients.contains_key(&(h, sig.clone())) {
                    return Err(IoError::DuplicateName { file: file.to_string(), line: ln, name: sig });
                }
                model = Some(m.with(h, &sig, c));
            }
            Some(other) => return Err(IoError::parse(file, ln, format!("unknown keyword `{other}`"))),
            None => {}
        }
        if t.next().is_some() {
            return Err(IoError::parse(file, ln, "trailing fields"));
        }
    }
    model.ok_or_else(|| IoError::parse(file, 1, "model has no `property` line"))
}

pub fn write_sd_model(m: &SdModel) -> String {
    let mut out = format!("property {}\n", m.property);
    for ((h, s), c) in &m.coefficients {
        let _ = writeln!(out, "signature {h} {s} {}", num(*c));
    }
    out
}

/// Lines: `type NAME DELTA PHI_1 PHI_2 PHI_3 PHI_AR`, `dummy NAME`,
/// `vertex IDX TYPE` (1-based, in order), `bond V W ORDER`.
pub fn parse_ti_assignment(file: &str, text: &str) -> Result<TiAssignment, IoError> {
    let mut types: Vec<NodeType> = Vec::new();
    let mut y = Vec::new();
    let mut bonds = Vec::new();
    for (ln, l) in content_lines(text) {
        let mut t = l.split_whitespace();
        let key = t.next().unwrap_or_default();
        match key {
            "type" | "dummy" => {
                let name: String = field(file, ln, "type name", t.next())?;
                if types.iter().any(|ty| ty.name == name) {
                    return Err(IoError::DuplicateName { file: file.to_string(), line: ln, name });
                }
                if key == "dummy" {
                    types.push(NodeType { name, ..NodeType::dummy() });
                } else {
                    let delta: u32 = field(file, ln, "delta", t.next())?;
                    let mut phi = [0u32; 4];
                    for p in &mut phi {
                        *p = field(file, ln, "bond count", t.next())?;
                    }
                    types.push(NodeType { name, delta, phi, dummy: false });
                }
            }
            "vertex" => {
                let idx: usize = field(file, ln, "vertex index", t.next())?;
                if idx != y.len() + 1 {
                    return Err(IoError::parse(file, ln, format!("vertex {idx}, expected {}", y.len() + 1)));
                }
                let name: String = field(file, ln, "type name", t.next())?;
                let l = types
                    .iter()
                    .position(|ty| ty.name == name)
                    .ok_or_else(|| IoError::parse(file, ln, format!("unknown type `{name}`")))?;
                y.push(l);
            }
            "bond" => {
                let v: usize = field(file, ln, "vertex", t.next())?;
                let w: usize = field(file, ln, "vertex", t.next())?;
                let b: BondType = field(file, ln, "bond order", t.next())?;
                if v == 0 || w == 0 {
                    return Err(IoError::parse(file, ln, "vertices are numbered from 1"));
                }
                bonds.push((v - 1, w - 1, b));
            }
            other => return Err(IoError::parse(file, ln, format!("unknown keyword `{other}`"))),
        }
        if t.next().is_some() {
            return Err(IoError::parse(file, ln, "trailing fields"));
        }
    }
    TiAssignment::new(types, y, &bonds).map_err(|e| IoError::parse(file, 1, e.to_string()))
}

pub fn write_ti_assignment(a: &TiAssignment) -> String {
    let mut out = String::new();
    for ty in a.node_types() {
        if ty.dummy {
            let _ = writeln!(out, "dummy {}", ty.name);
        } else {
            let [p1, p2, p3, pa] = ty.phi;
            let _ = writeln!(out, "type {} {} {p1} {p2} {p3} {pa}", ty.name, ty.delta);
        }
    }
    for (v, &l) in a.type_indices().iter().enumerate() {
        let _ = writeln!(out, "vertex {} {}", v + 1, a.node_types()[l].name);
    }
    for (v, w, b) in a.bonds() {
        let _ = writeln!(out, "bond {} {} {}", v + 1, w + 1, b.token());
    }
    out
}
