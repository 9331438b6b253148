//! Problem files: `[section]` headers followed by keyword lines.
//!
//! ```text
//! [library]      file NAME            use D1 D2 ...
//! [models]       file NAME            (one per property, in order)
//! [bounds]       total [LO] HI        descriptor NAME LO HI     property NAME LO HI
//! [objective]    mode feasibility|target|direct
//!                target PROP VALUE WEIGHT     norm absolute|squared
//!                sense minimize|maximize
//!                function property PROP | function linear CONST [PROP COEF]... | function distance
//! [fixed]        NAME COUNT
//! [structure]    check none|basic|aromatic    m M    rings A L    max_aliphatic_rings K
//! [constraints]  inequality|equality CONST [n:DESC|p:PROP COEF]...
//! [mixture]      target PROP VALUE WEIGHT     norm ...     bound PROP LO HI
//! [process]      mu NAME LO HI        term WEIGHT CONST [p:PROP|mu:NAME COEF]...    norm ...
//! ```
//!
//! Process cost is Σ WEIGHT·(CONST + Σ COEF·VAR)². Constraints read h = CONST + Σ COEF·VAR.

use std::collections::BTreeMap;
use std::fmt::{self, Write};
use std::path::Path;
use std::sync::Arc;

use super::library::parse_group_library_str;
use super::model::parse_gc_model;
use super::{content_lines, field, num, read_file, DirResolver, IoError, Resolver};
use crate::gc::GcModel;
use crate::graph::RingCounts;
use crate::solver::{
    ConstraintFn, ConstraintKind, DesignProblem, DeviationNorm, DirectFn, MixtureObjective, MixtureProblem,
    Objective, ProcessProblem, Sense, StructureCheck, UserConstraint, DEFAULT_MIN_TOTAL,
};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundsSpec {
    pub total_lower: Option<u32>,
    pub total_upper: Option<u32>,
    pub descriptors: Vec<(String, u32, u32)>,
    pub properties: Vec<(String, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum ObjectiveSpec {
    #[default]
    Feasibility,
    /// (property, target, weight)
    Target { targets: Vec<(String, f64, f64)>, norm: DeviationNorm },
    Direct { sense: Sense, function: DirectSpec },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DirectSpec {
    Property(String),
    Linear { constant: f64, terms: Vec<(String, f64)> },
    /// Squared distance to the `target` lines.
    Distance { targets: Vec<(String, f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum StructureSpec {
    None,
    Basic { m: Option<i32> },
    Aromatic { rings: Option<(usize, usize)>, max_aliphatic_rings: u32 },
}

impl Default for StructureSpec {
    fn default() -> Self {
        StructureSpec::Basic { m: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    pub constant: f64,
    /// (`n:NAME` or `p:NAME`, coefficient)
    pub terms: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MixtureSpec {
    pub targets: Vec<(String, f64, f64)>,
    pub norm: DeviationNorm,
    pub bounds: Vec<(String, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessTerm {
    pub weight: f64,
    pub constant: f64,
    /// (`p:NAME` or `mu:NAME`, coefficient)
    pub vars: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProcessSpec {
    pub mu: Vec<(String, f64, f64)>,
    pub terms: Vec<ProcessTerm>,
    pub norm: DeviationNorm,
}

/// Parsed problem file, before file references are resolved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProblemSpec {
    pub library: Option<String>,
    pub descriptors: Option<Vec<String>>,
    pub models: Vec<String>,
    pub bounds: BoundsSpec,
    pub objective: ObjectiveSpec,
    pub fixed: Vec<(String, u32)>,
    pub structure: StructureSpec,
    pub constraints: Vec<ConstraintSpec>,
    pub mixture: Option<MixtureSpec>,
    pub process: Option<ProcessSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Library,
    Models,
    Bounds,
    Objective,
    Fixed,
    Structure,
    Constraints,
    Mixture,
    Process,
}

fn parse_norm(file: &str, ln: usize, s: Option<&str>) -> Result<DeviationNorm, IoError> {
    match s {
        Some("absolute") => Ok(DeviationNorm::Absolute),
        Some("squared") => Ok(DeviationNorm::Squared),
        other => Err(IoError::parse(file, ln, format!("unknown norm `{}`", other.unwrap_or("")))),
    }
}

fn norm_str(n: DeviationNorm) -> &'static str {
    match n {
        DeviationNorm::Absolute => "absolute",
        DeviationNorm::Squared => "squared",
    }
}

fn ordered<T: PartialOrd + fmt::Display>(what: &str, lo: T, hi: T) -> Result<(), IoError> {
    if lo > hi {
        return Err(IoError::InconsistentBounds(format!("{what}: {lo} > {hi}")));
    }
    Ok(())
}

/// `NAME COEF` pairs until the end of the line.
fn pairs<'a>(file: &str, ln: usize, t: impl Iterator<Item = &'a str>) -> Result<Vec<(String, f64)>, IoError> {
    let rest: Vec<&str> = t.collect();
    if !rest.len().is_multiple_of(2) {
        return Err(IoError::parse(file, ln, "expected NAME COEF pairs"));
    }
    rest.chunks(2).map(|c| Ok((c[0].to_string(), field(file, ln, "coefficient", Some(c[1]))?))).collect()
}

fn target_line<'a>(file: &str, ln: usize, t: &mut impl Iterator<Item = &'a str>) -> Result<(String, f64, f64), IoError> {
    let name: String = field(file, ln, "property", t.next())?;
    let value: f64 = field(file, ln, "target", t.next())?;
    let weight: f64 = field(file, ln, "weight", t.next())?;
    if !(weight >= 0.0) {
        return Err(IoError::parse(file, ln, "weights must be non-negative"));
    }
    Ok((name, value, weight))
}

pub fn parse_problem(path: &Path) -> Result<ProblemSpec, IoError> {
    parse_problem_str(&path.display().to_string(), &read_file(path)?)
}

pub fn parse_problem_str(file: &str, text: &str) -> Result<ProblemSpec, IoError> {
    let mut spec = ProblemSpec::default();
    let mut section: Option<Section> = None;
    let mut mode: Option<String> = None;
    let mut sense = Sense::Minimize;
    let mut function: Option<(usize, Vec<String>)> = None;
    let mut targets = Vec::new();
    let mut norm = DeviationNorm::Absolute;
    let mut seen_sections = Vec::new();
    for (ln, l) in content_lines(text) {
        if let Some(name) = l.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let s = match name.trim() {
                "library" => Section::Library,
                "models" => Section::Models,
                "bounds" => Section::Bounds,
                "objective" => Section::Objective,
                "fixed" => Section::Fixed,
                "structure" => Section::Structure,
                "constraints" => Section::Constraints,
                "mixture" => Section::Mixture,
                "process" => Section::Process,
                other => return Err(IoError::parse(file, ln, format!("unknown section `{other}`"))),
            };
            if seen_sections.contains(&s) {
                return Err(IoError::parse(file, ln, format!("section `{name}` repeated")));
            }
            seen_sections.push(s);
            match s {
                Section::Mixture => spec.mixture = Some(MixtureSpec::default()),
                Section::Process => spec.process = Some(ProcessSpec::default()),
                _ => {}
            }
            section = Some(s);
            continue;
        }
        let sec = section.ok_or_else(|| IoError::parse(file, ln, "content before the first section"))?;
        let mut t = l.split_whitespace();
        let key = t.next().unwrap_or_default();
        let bad_key = || IoError::parse(file, ln, format!("unknown keyword `{key}`"));
        match sec {
            Section::Library => match key {
                "file" => spec.library = Some(field(file, ln, "file name", t.next())?),
                "use" => spec.descriptors = Some(t.by_ref().map(String::from).collect()),
                _ => return Err(bad_key()),
            },
            Section::Models => match key {
                "file" => spec.models.push(field(file, ln, "file name", t.next())?),
                _ => return Err(bad_key()),
            },
            Section::Bounds => match key {
                "total" => {
                    let a: u32 = field(file, ln, "total bound", t.next())?;
                    match t.next() {
                        Some(b) => {
                            let b: u32 = field(file, ln, "total bound", Some(b))?;
                            ordered("total", a, b)?;
                            spec.bounds.total_lower = Some(a);
                            spec.bounds.total_upper = Some(b);
                        }
                        None => spec.bounds.total_upper = Some(a),
                    }
                }
                "descriptor" => {
                    let name: String = field(file, ln, "descriptor", t.next())?;
                    let lo: u32 = field(file, ln, "lower bound", t.next())?;
                    let hi: u32 = field(file, ln, "upper bound", t.next())?;
                    ordered(&name, lo, hi)?;
                    spec.bounds.descriptors.push((name, lo, hi));
                }
                "property" => {
                    let name: String = field(file, ln, "property", t.next())?;
                    let lo: f64 = field(file, ln, "lower bound", t.next())?;
                    let hi: f64 = field(file, ln, "upper bound", t.next())?;
                    ordered(&name, lo, hi)?;
                    spec.bounds.properties.push((name, lo, hi));
                }
                _ => return Err(bad_key()),
            },
            Section::Objective => match key {
                "mode" => mode = Some(field(file, ln, "mode", t.next())?),
                "target" => targets.push(target_line(file, ln, &mut t)?),
                "norm" => norm = parse_norm(file, ln, t.next())?,
                "sense" => {
                    sense = match t.next() {
                        Some("minimize") => Sense::Minimize,
                        Some("maximize") => Sense::Maximize,
                        other => return Err(IoError::parse(file, ln, format!("unknown sense `{}`", other.unwrap_or("")))),
                    }
                }
                "function" => function = Some((ln, t.by_ref().map(String::from).collect())),
                _ => return Err(bad_key()),
            },
            Section::Fixed => {
                let count: u32 = field(file, ln, "count", t.next())?;
                spec.fixed.push((key.to_string(), count));
            }
            Section::Structure => match key {
                "check" => {
                    spec.structure = match t.next() {
                        Some("none") => StructureSpec::None,
                        Some("basic") => StructureSpec::Basic { m: None },
                        Some("aromatic") => StructureSpec::Aromatic { rings: None, max_aliphatic_rings: 0 },
                        other => return Err(IoError::parse(file, ln, format!("unknown check `{}`", other.unwrap_or("")))),
                    }
                }
                "m" => match &mut spec.structure {
                    StructureSpec::Basic { m } => {
                        let v: i32 = field(file, ln, "m", t.next())?;
                        if !(-1..=1).contains(&v) {
                            return Err(IoError::parse(file, ln, "m must be -1, 0 or 1"));
                        }
                        *m = Some(v);
                    }
                    _ => return Err(IoError::parse(file, ln, "`m` applies to the basic check")),
                },
                "rings" | "max_aliphatic_rings" => match &mut spec.structure {
                    StructureSpec::Aromatic { rings, max_aliphatic_rings } => {
                        if key == "rings" {
                            *rings = Some((field(file, ln, "ring count", t.next())?, field(file, ln, "ring count", t.next())?));
                        } else {
                            *max_aliphatic_rings = field(file, ln, "ring count", t.next())?;
                        }
                    }
                    _ => return Err(IoError::parse(file, ln, format!("`{key}` applies to the aromatic check"))),
                },
                _ => return Err(bad_key()),
            },
            Section::Constraints => {
                let kind = match key {
                    "inequality" => ConstraintKind::Inequality,
                    "equality" => ConstraintKind::Equality,
                    _ => return Err(bad_key()),
                };
                let constant: f64 = field(file, ln, "constant", t.next())?;
                let terms = pairs(file, ln, t.by_ref())?;
                if let Some((v, _)) = terms.iter().find(|(v, _)| !v.starts_with("n:") && !v.starts_with("p:")) {
                    return Err(IoError::parse(file, ln, format!("variable `{v}` must start with n: or p:")));
                }
                spec.constraints.push(ConstraintSpec { kind, constant, terms });
            }
            Section::Mixture => {
                let mix = spec.mixture.as_mut().expect("created with the section");
                match key {
                    "target" => mix.targets.push(target_line(file, ln, &mut t)?),
                    "norm" => mix.norm = parse_norm(file, ln, t.next())?,
                    "bound" => {
                        let name: String = field(file, ln, "property", t.next())?;
                        let lo: f64 = field(file, ln, "lower bound", t.next())?;
                        let hi: f64 = field(file, ln, "upper bound", t.next())?;
                        ordered(&name, lo, hi)?;
                        mix.bounds.push((name, lo, hi));
                    }
                    _ => return Err(bad_key()),
                }
            }
            Section::Process => {
                let pr = spec.process.as_mut().expect("created with the section");
                match key {
                    "mu" => {
                        let name: String = field(file, ln, "variable", t.next())?;
                        let lo: f64 = field(file, ln, "lower bound", t.next())?;
                        let hi: f64 = field(file, ln, "upper bound", t.next())?;
                        ordered(&name, lo, hi)?;
                        pr.mu.push((name, lo, hi));
                    }
                    "term" => {
                        let weight: f64 = field(file, ln, "weight", t.next())?;
                        let constant: f64 = field(file, ln, "constant", t.next())?;
                        let vars = pairs(file, ln, t.by_ref())?;
                        if let Some((v, _)) = vars.iter().find(|(v, _)| !v.starts_with("p:") && !v.starts_with("mu:")) {
                            return Err(IoError::parse(file, ln, format!("variable `{v}` must start with p: or mu:")));
                        }
                        pr.terms.push(ProcessTerm { weight, constant, vars });
                    }
                    "norm" => pr.norm = parse_norm(file, ln, t.next())?,
                    _ => return Err(bad_key()),
                }
            }
        }
        if t.next().is_some() {
            return Err(IoError::parse(file, ln, "trailing fields"));
        }
    }
    spec.objective = match mode.as_deref() {
        None | Some("feasibility") => ObjectiveSpec::Feasibility,
        Some("target") => ObjectiveSpec::Target { targets, norm },
        Some("direct") => {
            let (ln, words) = function.ok_or_else(|| IoError::parse(file, 1, "direct mode needs a `function` line"))?;
            let mut w = words.iter().map(String::as_str);
            let function = match w.next() {
                Some("property") => DirectSpec::Property(field(file, ln, "property", w.next())?),
                Some("linear") => {
                    let constant: f64 = field(file, ln, "constant", w.next())?;
                    DirectSpec::Linear { constant, terms: pairs(file, ln, w.by_ref())? }
                }
                Some("distance") => DirectSpec::Distance { targets },
                other => return Err(IoError::parse(file, ln, format!("unknown function `{}`", other.unwrap_or("")))),
            };
            if w.next().is_some() {
                return Err(IoError::parse(file, ln, "trailing fields"));
            }
            ObjectiveSpec::Direct { sense, function }
        }
        Some(other) => return Err(IoError::parse(file, 1, format!("unknown mode `{other}`"))),
    };
    Ok(spec)
}

fn write_pairs(out: &mut String, pairs: &[(String, f64)]) {
    for (v, c) in pairs {
        let _ = write!(out, " {v} {}", num(*c));
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let o = &mut out;
        let _ = writeln!(o, "[library]");
        if let Some(l) = &self.library {
            let _ = writeln!(o, "file {l}");
        }
        if let Some(d) = &self.descriptors {
            let _ = writeln!(o, "use {}", d.join(" "));
        }
        let _ = writeln!(o, "\n[models]");
        for m in &self.models {
            let _ = writeln!(o, "file {m}");
        }
        let _ = writeln!(o, "\n[bounds]");
        match (self.bounds.total_lower, self.bounds.total_upper) {
            (Some(a), Some(b)) => {
                let _ = writeln!(o, "total {a} {b}");
            }
            (None, Some(b)) => {
                let _ = writeln!(o, "total {b}");
            }
            _ => {}
        }
        for (d, lo, hi) in &self.bounds.descriptors {
            let _ = writeln!(o, "descriptor {d} {lo} {hi}");
        }
        for (p, lo, hi) in &self.bounds.properties {
            let _ = writeln!(o, "property {p} {} {}", num(*lo), num(*hi));
        }
        let _ = writeln!(o, "\n[objective]");
        let targets = |o: &mut String, ts: &[(String, f64, f64)]| {
            for (p, v, w) in ts {
                let _ = writeln!(o, "target {p} {} {}", num(*v), num(*w));
            }
        };
        match &self.objective {
            ObjectiveSpec::Feasibility => {
                let _ = writeln!(o, "mode feasibility");
            }
            ObjectiveSpec::Target { targets: ts, norm } => {
                let _ = writeln!(o, "mode target\nnorm {}", norm_str(*norm));
                targets(o, ts);
            }
            ObjectiveSpec::Direct { sense, function } => {
                let s = if *sense == Sense::Minimize { "minimize" } else { "maximize" };
                let _ = writeln!(o, "mode direct\nsense {s}");
                match function {
                    DirectSpec::Property(p) => {
                        let _ = writeln!(o, "function property {p}");
                    }
                    DirectSpec::Linear { constant, terms } => {
                        let _ = write!(o, "function linear {}", num(*constant));
                        write_pairs(o, terms);
                        o.push('\n');
                    }
                    DirectSpec::Distance { targets: ts } => {
                        let _ = writeln!(o, "function distance");
                        targets(o, ts);
                    }
                }
            }
        }
        if !self.fixed.is_empty() {
            let _ = writeln!(o, "\n[fixed]");
            for (d, c) in &self.fixed {
                let _ = writeln!(o, "{d} {c}");
            }
        }
        let _ = writeln!(o, "\n[structure]");
        match &self.structure {
            StructureSpec::None => {
                let _ = writeln!(o, "check none");
            }
            StructureSpec::Basic { m } => {
                let _ = writeln!(o, "check basic");
                if let Some(m) = m {
                    let _ = writeln!(o, "m {m}");
                }
            }
            StructureSpec::Aromatic { rings, max_aliphatic_rings } => {
                let _ = writeln!(o, "check aromatic\nmax_aliphatic_rings {max_aliphatic_rings}");
                if let Some((a, l)) = rings {
                    let _ = writeln!(o, "rings {a} {l}");
                }
            }
        }
        if !self.constraints.is_empty() {
            let _ = writeln!(o, "\n[constraints]");
            for c in &self.constraints {
                let k = if c.kind == ConstraintKind::Equality { "equality" } else { "inequality" };
                let _ = write!(o, "{k} {}", num(c.constant));
                write_pairs(o, &c.terms);
                o.push('\n');
            }
        }
        if let Some(m) = &self.mixture {
            let _ = writeln!(o, "\n[mixture]\nnorm {}", norm_str(m.norm));
            targets(o, &m.targets);
            for (p, lo, hi) in &m.bounds {
                let _ = writeln!(o, "bound {p} {} {}", num(*lo), num(*hi));
            }
        }
        if let Some(p) = &self.process {
            let _ = writeln!(o, "\n[process]\nnorm {}", norm_str(p.norm));
            for (n, lo, hi) in &p.mu {
                let _ = writeln!(o, "mu {n} {} {}", num(*lo), num(*hi));
            }
            for t in &p.terms {
                let _ = write!(o, "term {} {}", num(t.weight), num(t.constant));
                write_pairs(o, &t.vars);
                o.push('\n');
            }
        }
        f.write_str(&out)
    }
}

/// A problem with its files resolved, ready for the solver.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub spec: ProblemSpec,
    pub problem: DesignProblem,
    pub mixture: Option<MixtureProblem>,
    pub process: Option<ProcessProblem>,
}

impl LoadedProblem {
    pub fn from_path(path: &Path) -> Result<Self, IoError> {
        let spec = parse_problem(path)?;
        load_problem(&spec, &DirResolver::beside(path))
    }
}

fn invalid(msg: String) -> IoError {
    IoError::Parse { file: "<problem>".into(), line: 0, message: msg }
}

pub fn load_problem(spec: &ProblemSpec, resolver: &dyn Resolver) -> Result<LoadedProblem, IoError> {
    let lib_file = spec.library.as_deref().ok_or_else(|| invalid("missing [library] file".into()))?;
    let library = parse_group_library_str(lib_file, &resolver.read(lib_file)?, resolver)?;
    let models: Vec<GcModel> =
        spec.models.iter().map(|m| parse_gc_model(m, &resolver.read(m)?)).collect::<Result<_, _>>()?;
    let prop_index: BTreeMap<String, usize> = models.iter().enumerate().map(|(i, m)| (m.property.clone(), i)).collect();
    if prop_index.len() != models.len() {
        return Err(invalid("two models estimate the same property".into()));
    }
    let prop = |name: &str| prop_index.get(name).copied().ok_or_else(|| invalid(format!("unknown property `{name}`")));
    let nu = spec.bounds.total_upper.ok_or_else(|| invalid("missing total upper bound".into()))?;
    let nl = spec.bounds.total_lower.unwrap_or(DEFAULT_MIN_TOTAL.min(nu));
    ordered("total", nl, nu)?;

    let mut problem = DesignProblem::gc(library.clone(), models, nu);
    problem.total_bounds = (nl, nu);
    if let Some(d) = &spec.descriptors {
        problem.descriptors = d.clone();
    }
    for (d, lo, hi) in &spec.bounds.descriptors {
        problem.descriptor_bounds.insert(d.clone(), (*lo, *hi));
    }
    for (p, lo, hi) in &spec.bounds.properties {
        problem.property_bounds[prop(p)?] = (*lo, *hi);
    }
    for (d, c) in &spec.fixed {
        problem.fixed.insert(d.clone(), *c);
    }
    let k = problem.models.len();
    let dense_targets = |ts: &[(String, f64, f64)]| -> Result<(Vec<f64>, Vec<f64>), IoError> {
        let mut t = vec![0.0; k];
        let mut w = vec![0.0; k];
        for (p, v, wt) in ts {
            let i = prop(p)?;
            t[i] = *v;
            w[i] = *wt;
        }
        Ok((t, w))
    };
    problem.objective = match &spec.objective {
        ObjectiveSpec::Feasibility => Objective::Feasibility,
        ObjectiveSpec::Target { targets, norm } => {
            let (targets, weights) = dense_targets(targets)?;
            Objective::Target { targets, weights, norm: *norm }
        }
        ObjectiveSpec::Direct { sense, function } => {
            let function = match function {
                DirectSpec::Property(p) => DirectFn::Property(prop(p)?),
                DirectSpec::Linear { constant, terms } => {
                    let mut coefficients = vec![0.0; k];
                    for (p, c) in terms {
                        coefficients[prop(p)?] += c;
                    }
                    DirectFn::Linear { coefficients, constant: *constant }
                }
                DirectSpec::Distance { targets } => {
                    let (targets, weights) = dense_targets(targets)?;
                    DirectFn::SquaredDistance { targets, weights }
                }
            };
            Objective::Direct { sense: *sense, function }
        }
    };
    problem.structure = match &spec.structure {
        StructureSpec::None => StructureCheck::None,
        StructureSpec::Basic { m } => StructureCheck::GcBasic { library: library.clone(), m: *m },
        StructureSpec::Aromatic { rings, max_aliphatic_rings } => StructureCheck::GcAromatic {
            library: library.clone(),
            rings: rings.map(|(a, l)| RingCounts::new(a, l)),
            max_aliphatic_rings: *max_aliphatic_rings,
        },
    };
    for c in &spec.constraints {
        let mut descriptors = BTreeMap::new();
        let mut properties = vec![0.0; k];
        for (v, coef) in &c.terms {
            if let Some(d) = v.strip_prefix("n:") {
                *descriptors.entry(d.to_string()).or_insert(0.0) += coef;
            } else if let Some(p) = v.strip_prefix("p:") {
                properties[prop(p)?] += coef;
            }
        }
        problem.constraints.push(UserConstraint {
            kind: c.kind,
            function: ConstraintFn::Linear { descriptors, properties, constant: c.constant },
        });
    }

    let mixture = match &spec.mixture {
        None => None,
        Some(m) => {
            let (targets, weights) = dense_targets(&m.targets)?;
            let mut base = problem.clone();
            base.objective = Objective::Feasibility;
            let mut mp = MixtureProblem::new(
                vec![base.clone(), base],
                MixtureObjective::Target { targets, weights, norm: m.norm },
            );
            for (p, lo, hi) in &m.bounds {
                mp.mixture_bounds[prop(p)?] = (*lo, *hi);
            }
            Some(mp)
        }
    };

    let process = match &spec.process {
        None => None,
        Some(pr) => {
            let mu_index: BTreeMap<&str, usize> = pr.mu.iter().enumerate().map(|(i, (n, _, _))| (n.as_str(), i)).collect();
            // Each term becomes (weight, constant, [(is_mu, index, coef)]).
            let mut terms = Vec::new();
            for t in &pr.terms {
                let mut vars = Vec::new();
                for (v, c) in &t.vars {
                    if let Some(p) = v.strip_prefix("p:") {
                        vars.push((false, prop(p)?, *c));
                    } else if let Some(m) = v.strip_prefix("mu:") {
                        let i = mu_index.get(m).copied().ok_or_else(|| invalid(format!("unknown process variable `{m}`")))?;
                        vars.push((true, i, *c));
                    }
                }
                terms.push((t.weight, t.constant, vars));
            }
            let cost = Arc::new(move |p: &[f64], mu: &[f64]| {
                terms
                    .iter()
                    .map(|(w, c, vars)| {
                        let s: f64 = vars.iter().map(|&(is_mu, i, k)| k * if is_mu { mu[i] } else { p[i] }).sum();
                        w * (c + s).powi(2)
                    })
                    .sum()
            });
            let mut pp = ProcessProblem::new(cost, pr.mu.iter().map(|(_, lo, hi)| (*lo, *hi)).collect());
            pp.target_norm = pr.norm;
            Some(pp)
        }
    };
    Ok(LoadedProblem { spec: spec.clone(), problem, mixture, process })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LIB: &str = "CH3,1,0,0,0\nCH2,2,0,0,0\nOH,1,0,0,0\n";
    const MODEL: &str = "property P\ngroup CH3 1.0\ngroup CH2 0.5\ngroup OH 2.0\n";

    fn files(name: &str) -> Option<String> {
        match name {
            "a.lib" => Some(LIB.into()),
            "p.gcm" => Some(MODEL.into()),
            _ => None,
        }
    }

    #[test]
    fn minimal_problem_defaults() {
        let spec = parse_problem_str("f", "[library]\nfile a.lib\n[models]\nfile p.gcm\n[bounds]\ntotal 6\n").unwrap();
        let loaded = load_problem(&spec, &files).unwrap();
        assert_eq!(loaded.problem.total_bounds, (2, 6));
        assert!(matches!(loaded.problem.objective, Objective::Feasibility));
        assert!(matches!(loaded.problem.structure, StructureCheck::GcBasic { m: None, .. }));
    }

    #[test]
    fn inconsistent_bounds() {
        let text = "[library]\nfile a.lib\n[bounds]\ntotal 6\nproperty P 3 1\n";
        assert!(matches!(parse_problem_str("f", text), Err(IoError::InconsistentBounds(_))));
        assert!(matches!(parse_problem_str("f", "[library]\n[bounds]\ntotal 5 2\n"), Err(IoError::InconsistentBounds(_))));
    }

    #[test]
    fn full_round_trip() {
        let text = "\
[library]
file a.lib
use CH3 CH2 OH
[models]
file p.gcm
[bounds]
total 2 6
descriptor OH 0 1
property P 0 inf
[objective]
mode direct
sense maximize
function linear 0.5 P 2
[fixed]
CH3 1
[structure]
check basic
m -1
[constraints]
inequality -4 n:CH2 1
equality 0 p:P 0
[mixture]
target P 3 1
bound P 1 5
[process]
mu r 0 10
term 1 -5 p:P 1
term 0.1 0 mu:r 1
";
        let spec = parse_problem_str("f", text).unwrap();
        let again = parse_problem_str("g", &spec.to_string()).unwrap();
        assert_eq!(spec, again);
        let loaded = load_problem(&spec, &files).unwrap();
        assert_eq!(loaded.problem.constraints.len(), 2);
        let pp = loaded.process.unwrap();
        assert!(((pp.cost)(&[5.0], &[1.0]) - 0.1).abs() < 1e-12);
        assert!(loaded.mixture.is_some());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_problem_str("f", "file a.lib\n"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(parse_problem_str("f", "[nope]\n"), Err(IoError::Parse { .. })));
        assert!(matches!(parse_problem_str("f", "[objective]\nmode direct\n"), Err(IoError::Parse { .. })));
    }
}
