//! Line-oriented text formats. Blank lines and `#` comments are ignored
//! everywhere.

mod graph;
mod library;
mod model;
mod problem;
mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use graph::{parse_fragments, parse_graph, write_fragments, write_graph};
pub use library::{parse_group_library, parse_group_library_str, write_group_library};
pub use model::{
    parse_descriptor_vector, parse_gc_model, parse_sd_model, parse_ti_assignment, write_descriptor_vector,
    write_gc_model, write_sd_model, write_ti_assignment,
};
pub use problem::{
    load_problem, parse_problem, parse_problem_str, BoundsSpec, ConstraintSpec, LoadedProblem, MixtureSpec,
    ObjectiveSpec, ProblemSpec, ProcessSpec, ProcessTerm, StructureSpec,
};
pub use report::{RunReport, SolutionRow};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{file}:{line}: duplicate name `{name}`")]
    DuplicateName { file: String, line: usize, name: String },
    #[error("{file}:{line}: fragment reference `{reference}` does not resolve")]
    DanglingFragmentRef { file: String, line: usize, reference: String },
    #[error("inconsistent bounds: {0}")]
    InconsistentBounds(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
}

impl IoError {
    pub(crate) fn parse(file: &str, line: usize, message: impl Into<String>) -> Self {
        IoError::Parse { file: file.to_string(), line, message: message.into() }
    }
}

/// Resolves a file name mentioned inside another file to its contents.
pub trait Resolver {
    fn read(&self, name: &str) -> Result<String, IoError>;
}

/// Reads names relative to a directory.
pub struct DirResolver(pub PathBuf);

impl DirResolver {
    /// Resolver for files next to `path`.
    pub fn beside(path: &Path) -> Self {
        DirResolver(path.parent().map(Path::to_path_buf).unwrap_or_default())
    }
}

impl Resolver for DirResolver {
    fn read(&self, name: &str) -> Result<String, IoError> {
        read_file(&self.0.join(name))
    }
}

impl<F: Fn(&str) -> Option<String>> Resolver for F {
    fn read(&self, name: &str) -> Result<String, IoError> {
        self(name).ok_or_else(|| IoError::Read {
            path: name.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not found"),
        })
    }
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })
}

/// Non-empty lines with comments stripped, numbered from 1. A `#` opens a
/// comment at the start of a line or after whitespace, so `file#NAME`
/// references survive.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let cut = l
            .char_indices()
            .find(|&(j, c)| c == '#' && (j == 0 || l[..j].ends_with(char::is_whitespace)))
            .map_or(l.len(), |(j, _)| j);
        let l = l[..cut].trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Parses one whitespace-separated field.
pub(crate) fn field<T: std::str::FromStr>(file: &str, line: usize, what: &str, s: Option<&str>) -> Result<T, IoError> {
    let s = s.ok_or_else(|| IoError::parse(file, line, format!("missing {what}")))?;
    s.parse().map_err(|_| IoError::parse(file, line, format!("bad {what} `{s}`")))
}

/// Shortest decimal that round-trips, used by all writers.
pub(crate) fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}
