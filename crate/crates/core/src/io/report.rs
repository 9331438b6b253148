//! Solution tables: `rank objective n p optimality`, numbers to 6 decimals.

use std::fmt;

use crate::descriptor::DescriptorVector;
use crate::solver::{DesignSolution, Optimality};

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRow {
    pub rank: usize,
    pub objective: f64,
    pub n: DescriptorVector,
    pub p: Vec<f64>,
    pub optimality: Optimality,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub properties: Vec<String>,
    pub rows: Vec<SolutionRow>,
    /// Extra `key: value` lines printed after the table.
    pub notes: Vec<(String, String)>,
}

impl RunReport {
    pub fn new(properties: Vec<String>, solutions: &[DesignSolution]) -> Self {
        let rows = solutions
            .iter()
            .enumerate()
            .map(|(i, s)| SolutionRow {
                rank: i + 1,
                objective: s.objective,
                n: s.n.clone(),
                p: s.p.clone(),
                optimality: s.optimality,
            })
            .collect();
        RunReport { properties, rows, notes: Vec::new() }
    }

    pub fn note(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.notes.push((key.into(), value.into()));
        self
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p_header = if self.properties.is_empty() { "p".to_string() } else { format!("p({})", self.properties.join(",")) };
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                let p: Vec<String> = r.p.iter().map(|x| format!("{x:.6}")).collect();
                [r.rank.to_string(), format!("{:.6}", r.objective), r.n.to_string(), p.join(","), r.optimality.to_string()]
            })
            .collect();
        let header = ["rank".to_string(), "objective".into(), "n".into(), p_header, "optimality".into()];
        let mut width = header.clone().map(|h| h.len());
        for row in &cells {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        for row in std::iter::once(&header).chain(&cells) {
            let line: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
            writeln!(f, "{}", line.join("  ").trim_end())?;
        }
        for (k, v) in &self.notes {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}
