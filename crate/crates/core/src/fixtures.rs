//! Bundled fixture files. Setting `CAMD_FIXTURE_DIR` makes lookups read from
//! that directory first.

use crate::graph::{GroupLibrary, MolecularGraph};
use crate::io::{self, IoError, LoadedProblem, Resolver};

pub const ENV_VAR: &str = "CAMD_FIXTURE_DIR";

/// (file name, contents) for every bundled fixture.
pub const FILES: &[(&str, &str)] = &[
    ("alkanes.frag", include_str!("../fixtures/alkanes.frag")),
    ("alkanes.lib", include_str!("../fixtures/alkanes.lib")),
    ("alkanes_design.problem", include_str!("../fixtures/alkanes_design.problem")),
    ("alkanes_p.gcm", include_str!("../fixtures/alkanes_p.gcm")),
    ("aromatics.frag", include_str!("../fixtures/aromatics.frag")),
    ("aromatics.lib", include_str!("../fixtures/aromatics.lib")),
    ("cyclohexane.graph", include_str!("../fixtures/cyclohexane.graph")),
    ("dmb.graph", include_str!("../fixtures/dmb.graph")),
    ("fig10.sig", include_str!("../fixtures/fig10.sig")),
    ("fig2.gcm", include_str!("../fixtures/fig2.gcm")),
    ("fig2.n", include_str!("../fixtures/fig2.n")),
    ("fig5.graph", include_str!("../fixtures/fig5.graph")),
    ("fig8.lib", include_str!("../fixtures/fig8.lib")),
    ("fig8.n", include_str!("../fixtures/fig8.n")),
    ("fig8_counter.n", include_str!("../fixtures/fig8_counter.n")),
    ("fig8_quaternary.lib", include_str!("../fixtures/fig8_quaternary.lib")),
    ("fig8_target.problem", include_str!("../fixtures/fig8_target.problem")),
    ("fig8_tb.gcm", include_str!("../fixtures/fig8_tb.gcm")),
    ("fig9.ti", include_str!("../fixtures/fig9.ti")),
    ("mixture_demo.problem", include_str!("../fixtures/mixture_demo.problem")),
    ("nhexane.graph", include_str!("../fixtures/nhexane.graph")),
    ("oxygenates.frag", include_str!("../fixtures/oxygenates.frag")),
    ("oxygenates.lib", include_str!("../fixtures/oxygenates.lib")),
    ("process_demo.problem", include_str!("../fixtures/process_demo.problem")),
    ("tmb.graph", include_str!("../fixtures/tmb.graph")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Contents of , from the override directory when set, else bundled.
pub fn read(name: &str) -> Option<String> {
    if let Some(dir) = std::env::var_os(ENV_VAR) {
        if let Ok(t) = std::fs::read_to_string(std::path::Path::new(&dir).join(name)) {
            return Some(t);
        }
    }
    bundled(name).map(str::to_string)
}

/// Resolver over the fixture set.
pub struct Fixtures;

impl Resolver for Fixtures {
    fn read(&self, name: &str) -> Result<String, IoError> {
        (|n: &str| read(n)).read(name)
    }
}

fn text(name: &str) -> Result<String, IoError> {
    Fixtures.read(name)
}

pub fn library(name: &str) -> Result<GroupLibrary, IoError> {
    io::parse_group_library_str(name, &text(name)?, &Fixtures)
}

pub fn graph(name: &str) -> Result<MolecularGraph, IoError> {
    io::parse_graph(name, &text(name)?)
}

pub fn problem(name: &str) -> Result<LoadedProblem, IoError> {
    let spec = io::parse_problem_str(name, &text(name)?)?;
    io::load_problem(&spec, &Fixtures)
}
