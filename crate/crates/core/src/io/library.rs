//! Group library files: CSV rows `name,phi_ali,phi_arom,aromatic_atoms,rho,fragment_ref`.
//! `fragment_ref` is empty or `file#NAME`, with `file` resolved beside the library.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use super::graph::{parse_fragments, write_fragments};
use super::{content_lines, read_file, DirResolver, IoError, Resolver};
use crate::graph::{Fragment, Group, GroupLibrary};

const HEADER: &str = "name,phi_ali,phi_arom,aromatic_atoms,rho,fragment_ref";

pub fn parse_group_library(path: &Path) -> Result<GroupLibrary, IoError> {
    let text = read_file(path)?;
    parse_group_library_str(&path.display().to_string(), &text, &DirResolver::beside(path))
}

pub fn parse_group_library_str(file: &str, text: &str, resolver: &dyn Resolver) -> Result<GroupLibrary, IoError> {
    let mut fragment_files: BTreeMap<String, Option<Vec<(String, Fragment)>>> = BTreeMap::new();
    let mut groups: Vec<Group> = Vec::new();
    for (ln, l) in content_lines(text) {
        if l.replace(' ', "") == HEADER {
            continue;
        }
        let cols: Vec<&str> = l.split(',').map(str::trim).collect();
        if cols.len() != 5 && cols.len() != 6 {
            return Err(IoError::parse(file, ln, format!("expected 5 or 6 columns, found {}", cols.len())));
        }
        let int = |i: usize, what: &str| -> Result<u32, IoError> {
            cols[i].parse().map_err(|_| IoError::parse(file, ln, format!("bad {what} `{}`", cols[i])))
        };
        let name = cols[0].to_string();
        if groups.iter().any(|g| g.name == name) {
            return Err(IoError::DuplicateName { file: file.to_string(), line: ln, name });
        }
        let mut group = Group {
            name,
            phi_ali: int(1, "phi_ali")?,
            phi_arom: int(2, "phi_arom")?,
            aromatic_atom_count: int(3, "aromatic_atoms")?,
            rho: int(4, "rho")?,
            pattern: None,
        };
        if let Some(reference) = cols.get(5).filter(|r| !r.is_empty() && **r != "-") {
            let dangling =
                || IoError::DanglingFragmentRef { file: file.to_string(), line: ln, reference: reference.to_string() };
            let (frag_file, frag_name) = reference.split_once('#').ok_or_else(dangling)?;
            if !fragment_files.contains_key(frag_file) {
                let parsed = match resolver.read(frag_file) {
                    Ok(t) => Some(parse_fragments(frag_file, &t)?),
                    Err(_) => None,
                };
                fragment_files.insert(frag_file.to_string(), parsed);
            }
            let frags = fragment_files[frag_file].as_ref().ok_or_else(dangling)?;
            let frag = frags.iter().find(|(n, _)| n == frag_name).ok_or_else(dangling)?;
            group.pattern = Some(frag.1.clone());
        }
        groups.push(group);
    }
    if groups.is_empty() {
        return Err(IoError::parse(file, 1, "library has no groups"));
    }
    GroupLibrary::new(groups).map_err(|e| IoError::parse(file, 1, e.to_string()))
}

/// Library text plus, when any group has a pattern, the fragment file text
/// that its references point into (as `fragment_file#NAME`).
pub fn write_group_library(lib: &GroupLibrary, fragment_file: &str) -> (String, Option<String>) {
    let mut out = format!("{HEADER}\n");
    for g in lib.groups() {
        let reference = if g.pattern.is_some() { format!("{fragment_file}#{}", g.name) } else { String::new() };
        let _ = writeln!(out, "{},{},{},{},{},{}", g.name, g.phi_ali, g.phi_arom, g.aromatic_atom_count, g.rho, reference);
    }
    let patterned: Vec<(&str, &Fragment)> =
        lib.groups().iter().filter_map(|g| g.pattern.as_ref().map(|p| (g.name.as_str(), p))).collect();
    let frags = (!patterned.is_empty()).then(|| write_fragments(patterned));
    (out, frags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn simple_library() {
        let lib = parse_group_library_str("f", "# demo\nNH,2,0,0,0\nCH,3,0,0,0,\n", &none).unwrap();
        assert_eq!(lib.len(), 2);
        assert_eq!(lib.get("CH").unwrap().phi(), 3);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_group_library_str("f", "# nothing\n", &none), Err(IoError::Parse { .. })));
        assert!(matches!(
            parse_group_library_str("f", "CH3,1,0,0,0\nCH3,1,0,0,0\n", &none),
            Err(IoError::DuplicateName { line: 2, .. })
        ));
        assert!(matches!(
            parse_group_library_str("f", "CH3,1,0,0,0,x.frag#CH3\n", &none),
            Err(IoError::DanglingFragmentRef { .. })
        ));
        assert!(matches!(parse_group_library_str("f", "CH3,one,0,0,0\n", &none), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn fragments_resolve() {
        let frag = "fragment CH3\natoms 1 edges 0\n1 C 1 3 sp3\n";
        let resolve = |n: &str| (n == "a.frag").then(|| frag.to_string());
        let lib = parse_group_library_str("f", "CH3,1,0,0,0,a.frag#CH3\n", &resolve).unwrap();
        assert!(lib.get("CH3").unwrap().pattern.is_some());
        let missing = parse_group_library_str("f", "CH3,1,0,0,0,a.frag#CH2\n", &resolve);
        assert!(matches!(missing, Err(IoError::DanglingFragmentRef { .. })));
        let (text, frags) = write_group_library(&lib, "b.frag");
        let frags = frags.unwrap();
        let again = parse_group_library_str("g", &text, &|n: &str| (n == "b.frag").then(|| frags.clone())).unwrap();
        assert_eq!(lib, again);
    }
}
