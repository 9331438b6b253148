//! Valence-balance and group-sufficiency constraints on group counts.

use std::fmt;

use super::{write_lines, CheckLine, FeasibilityError};
use crate::descriptor::DescriptorVector;
use crate::graph::{Group, GroupLibrary, RingCounts};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SufficiencyCheck {
    pub group: String,
    /// `total`, `aliphatic` or `aromatic`.
    pub scope: &'static str,
    pub required: i64,
    pub available: i64,
}

impl SufficiencyCheck {
    pub fn ok(&self) -> bool {
        self.available >= self.required
    }
}

/// Outcome of the group-count checks. All quantities are exact integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcFeasibilityReport {
    /// Ring parameter: −1 acyclic, 0 monocyclic, 1 bicyclic. For the aromatic
    /// form this is total rings − 1.
    pub m: i32,
    pub rings: Option<RingCounts>,
    /// Σ (2 − Φ) n over the balanced groups.
    pub valence_lhs: i64,
    pub valence_rhs: i64,
    pub sufficiency: Vec<SufficiencyCheck>,
    /// Σ (2 − Φ^arom) n, which must vanish.
    pub aromatic_balance: Option<i64>,
    /// (Σ A n, 6 N_R^arom)
    pub aromatic_atoms: Option<(i64, i64)>,
}

impl GcFeasibilityReport {
    pub fn valence_balance_ok(&self) -> bool {
        self.valence_lhs == self.valence_rhs
    }

    pub fn valence_residual(&self) -> i64 {
        self.valence_lhs - self.valence_rhs
    }

    pub fn sufficiency_ok(&self) -> bool {
        self.sufficiency.iter().all(SufficiencyCheck::ok)
    }

    pub fn aromatic_balance_ok(&self) -> bool {
        self.aromatic_balance.is_none_or(|b| b == 0)
    }

    pub fn aromatic_atom_ok(&self) -> bool {
        self.aromatic_atoms.is_none_or(|(a, b)| a == b)
    }

    pub fn ok(&self) -> bool {
        self.valence_balance_ok() && self.sufficiency_ok() && self.aromatic_balance_ok() && self.aromatic_atom_ok()
    }

    pub fn lines(&self) -> Vec<CheckLine> {
        let mut out = vec![CheckLine::new("valence_balance", self.valence_balance_ok(), self.valence_residual())];
        if let Some(b) = self.aromatic_balance {
            out.push(CheckLine::new("aromatic_balance", b == 0, b));
        }
        if let Some((a, e)) = self.aromatic_atoms {
            out.push(CheckLine::new("aromatic_atoms", a == e, a - e));
        }
        for s in &self.sufficiency {
            let name = match s.scope {
                "total" => format!("sufficiency[{}]", s.group),
                scope => format!("sufficiency_{scope}[{}]", s.group),
            };
            out.push(CheckLine::new(name, s.ok(), s.available - s.required));
        }
        out
    }
}

impl fmt::Display for GcFeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_lines(f, &self.lines())
    }
}

fn present<'a>(n: &'a DescriptorVector, lib: &'a GroupLibrary) -> Result<Vec<(&'a Group, i64)>, FeasibilityError> {
    lib.check_keys(n).map_err(|e| match e {
        crate::graph::GraphError::UnknownGroup(g) => FeasibilityError::UnknownGroup(g),
        other => FeasibilityError::Graph(other),
    })?;
    Ok(lib.groups().iter().map(|g| (g, i64::from(n.get(&g.name)))).filter(|&(_, c)| c > 0).collect())
}

/// Odele–Macchietto constraints with total valence Φ = Φ^ali + Φ^arom:
/// Σ (2 − Φ) n = −2m, and Σ n ≥ n_d (Φ_d − 1) + 2 for every group present.
pub fn check_gc_basic(n: &DescriptorVector, lib: &GroupLibrary, m: i32) -> Result<GcFeasibilityReport, FeasibilityError> {
    let groups = present(n, lib)?;
    let total: i64 = groups.iter().map(|(_, c)| c).sum();
    let lhs = groups.iter().map(|(g, c)| (2 - i64::from(g.phi())) * c).sum();
    let sufficiency = groups
        .iter()
        .map(|(g, c)| SufficiencyCheck {
            group: g.name.clone(),
            scope: "total",
            required: c * (i64::from(g.phi()) - 1) + 2,
            available: total,
        })
        .collect();
    Ok(GcFeasibilityReport {
        m,
        rings: None,
        valence_lhs: lhs,
        valence_rhs: -2 * i64::from(m),
        sufficiency,
        aromatic_balance: None,
        aromatic_atoms: None,
    })
}

fn in_aliphatic_set(g: &Group) -> bool {
    g.phi_ali > 0 || !g.is_aromatic()
}

/// Aromatic extension for benzylic, non-fused six-membered rings.
///
/// The aromatic sufficiency bound is relaxed by 2 per aromatic ring, since
/// a closed ring needs no spare groups.
pub fn check_gc_aromatic(
    n: &DescriptorVector,
    lib: &GroupLibrary,
    n_r_arom: u32,
    n_r_ali: u32,
) -> Result<GcFeasibilityReport, FeasibilityError> {
    let groups = present(n, lib)?;
    let (arom, ali) = (i64::from(n_r_arom), i64::from(n_r_ali));

    let ali_groups: Vec<_> = groups.iter().filter(|(g, _)| in_aliphatic_set(g)).collect();
    let arom_groups: Vec<_> = groups.iter().filter(|(g, _)| g.phi_arom > 0).collect();

    let lhs: i64 = ali_groups.iter().map(|(g, c)| (2 - i64::from(g.phi_ali)) * c).sum();
    let rho: i64 = groups.iter().filter(|(g, _)| g.is_aromatic()).map(|(g, c)| i64::from(g.rho) * c).sum();
    let rhs = 2 - 2 * ali + 2 * rho - 2 * arom;

    let aromatic_balance = arom_groups.iter().map(|(g, c)| (2 - i64::from(g.phi_arom)) * c).sum();
    let atoms = groups.iter().map(|(g, c)| i64::from(g.aromatic_atom_count) * c).sum();

    let ali_total: i64 = ali_groups.iter().map(|(_, c)| c).sum();
    let arom_total: i64 = arom_groups.iter().map(|(_, c)| c).sum();
    let mut sufficiency: Vec<SufficiencyCheck> = ali_groups
        .iter()
        .map(|(g, c)| SufficiencyCheck {
            group: g.name.clone(),
            scope: "aliphatic",
            required: c * (i64::from(g.phi_ali) - 1) + 2,
            available: ali_total,
        })
        .collect();
    sufficiency.extend(arom_groups.iter().map(|(g, c)| SufficiencyCheck {
        group: g.name.clone(),
        scope: "aromatic",
        required: c * (i64::from(g.phi_arom) - 1) + 2 - 2 * arom,
        available: arom_total,
    }));

    Ok(GcFeasibilityReport {
        m: (n_r_arom + n_r_ali) as i32 - 1,
        rings: Some(RingCounts::new(n_r_arom as usize, n_r_ali as usize)),
        valence_lhs: lhs,
        valence_rhs: rhs,
        sufficiency,
        aromatic_balance: Some(aromatic_balance),
        aromatic_atoms: Some((atoms, 6 * arom)),
    })
}
