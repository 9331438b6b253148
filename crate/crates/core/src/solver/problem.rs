//! Problem and solution types shared by all drivers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::descriptor::DescriptorVector;
use crate::feasibility::SdConstraintData;
use crate::gc::GcModel;
use crate::graph::{GroupLibrary, MolecularGraph, RingCounts};

/// Absolute tolerance for equality user constraints.
pub const EQUALITY_TOLERANCE: f64 = 1e-6;

/// Evaluates `(n, p)` to a real.
pub type NpFn = Arc<dyn Fn(&DescriptorVector, &[f64]) -> f64 + Send + Sync>;
/// Bounds an objective over a box of property intervals.
pub type BoxBoundFn = Arc<dyn Fn(&[(f64, f64)]) -> f64 + Send + Sync>;

/// Structural feasibility test applied to every candidate.
#[derive(Debug, Clone)]
pub enum StructureCheck {
    None,
    /// Odele–Macchietto constraints. With `m = None` each of −1, 0, 1 is tried.
    GcBasic { library: GroupLibrary, m: Option<i32> },
    /// Aromatic extension. With `rings = None` the aromatic ring count is
    /// derived from the aromatic atom count and 0..=`max_aliphatic_rings`
    /// aliphatic rings are tried.
    GcAromatic { library: GroupLibrary, rings: Option<RingCounts>, max_aliphatic_rings: u32 },
    Sd { data: SdConstraintData },
}

impl StructureCheck {
    pub fn library(&self) -> Option<&GroupLibrary> {
        match self {
            StructureCheck::GcBasic { library, .. } | StructureCheck::GcAromatic { library, .. } => Some(library),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// How target deviations are aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeviationNorm {
    /// Σ w (d⁺ + d⁻)
    #[default]
    Absolute,
    /// Σ w (p^T − p)²
    Squared,
}

#[derive(Clone)]
pub enum DirectFn {
    /// p_k
    Property(usize),
    /// Σ_k c_k p_k + constant
    Linear { coefficients: Vec<f64>, constant: f64 },
    /// Σ_k w_k (p_k − t_k)²
    SquaredDistance { targets: Vec<f64>, weights: Vec<f64> },
    /// Arbitrary callback. `bound` must bound the objective over a property box
    /// from the favorable side (below when minimizing); without it the exact
    /// driver falls back to enumeration.
    Custom { eval: NpFn, bound: Option<BoxBoundFn> },
}

impl fmt::Debug for DirectFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectFn::Property(k) => write!(f, "Property({k})"),
            DirectFn::Linear { coefficients, constant } => write!(f, "Linear({coefficients:?}, {constant})"),
            DirectFn::SquaredDistance { targets, weights } => write!(f, "SquaredDistance({targets:?}, {weights:?})"),
            DirectFn::Custom { bound, .. } => write!(f, "Custom(bounded: {})", bound.is_some()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Objective {
    /// Constant objective: every feasible n is optimal.
    Feasibility,
    Target { targets: Vec<f64>, weights: Vec<f64>, norm: DeviationNorm },
    Direct { sense: Sense, function: DirectFn },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// h ≤ 0
    Inequality,
    /// |h| ≤ [`EQUALITY_TOLERANCE`]
    Equality,
}

#[derive(Clone)]
pub enum ConstraintFn {
    /// Σ a_d n_d + Σ b_k p_k + constant
    Linear { descriptors: BTreeMap<String, f64>, properties: Vec<f64>, constant: f64 },
    Custom(NpFn),
}

impl ConstraintFn {
    pub fn eval(&self, n: &DescriptorVector, p: &[f64]) -> f64 {
        match self {
            ConstraintFn::Linear { descriptors, properties, constant } => {
                let a: f64 = descriptors.iter().map(|(d, c)| c * f64::from(n.get(d))).sum();
                let b: f64 = properties.iter().zip(p).map(|(c, x)| c * x).sum();
                a + b + constant
            }
            ConstraintFn::Custom(f) => f(n, p),
        }
    }
}

impl fmt::Debug for ConstraintFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintFn::Linear { descriptors, properties, constant } => {
                write!(f, "Linear({descriptors:?}, {properties:?}, {constant})")
            }
            ConstraintFn::Custom(_) => f.write_str("Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct UserConstraint {
    pub kind: ConstraintKind,
    pub function: ConstraintFn,
}

impl UserConstraint {
    pub fn satisfied(&self, n: &DescriptorVector, p: &[f64]) -> bool {
        let h = self.function.eval(n, p);
        match self.kind {
            ConstraintKind::Inequality => h <= 0.0,
            ConstraintKind::Equality => h.abs() <= EQUALITY_TOLERANCE,
        }
    }
}

/// Single-molecule design problem over integer counts of `descriptors`.
#[derive(Debug, Clone)]
pub struct DesignProblem {
    /// Ordered descriptor index set; vectors are compared lexicographically in this order.
    pub descriptors: Vec<String>,
    /// One linear-or-transformed model per property.
    pub models: Vec<GcModel>,
    /// Per-model (p^L, p^U).
    pub property_bounds: Vec<(f64, f64)>,
    /// Per-descriptor (n^L, n^U); absent descriptors use (0, N^U).
    pub descriptor_bounds: BTreeMap<String, (u32, u32)>,
    /// (N^L, N^U)
    pub total_bounds: (u32, u32),
    /// Descriptors that must occur at least the given number of times.
    pub fixed: BTreeMap<String, u32>,
    pub objective: Objective,
    pub constraints: Vec<UserConstraint>,
    pub structure: StructureCheck,
}

pub const DEFAULT_MIN_TOTAL: u32 = 2;

impl DesignProblem {
    /// GC problem over every group of `library`, basic structural checks, no
    /// property bounds, feasibility objective.
    pub fn gc(library: GroupLibrary, models: Vec<GcModel>, max_total: u32) -> Self {
        let property_bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); models.len()];
        Self {
            descriptors: library.names(),
            models,
            property_bounds,
            descriptor_bounds: BTreeMap::new(),
            total_bounds: (DEFAULT_MIN_TOTAL.min(max_total), max_total),
            fixed: BTreeMap::new(),
            objective: Objective::Feasibility,
            constraints: Vec::new(),
            structure: StructureCheck::GcBasic { library, m: None },
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    /// Lowest admissible count, fixed minimums included.
    pub fn lower(&self, d: &str) -> u32 {
        let base = self.descriptor_bounds.get(d).map_or(0, |b| b.0);
        base.max(self.fixed.get(d).copied().unwrap_or(0))
    }

    pub fn upper(&self, d: &str) -> u32 {
        self.descriptor_bounds.get(d).map_or(self.total_bounds.1, |b| b.1).min(self.total_bounds.1)
    }

    /// Per-descriptor (lo, hi) in descriptor order.
    pub fn boxes(&self) -> Vec<(u32, u32)> {
        self.descriptors.iter().map(|d| (self.lower(d), self.upper(d))).collect()
    }

    pub fn to_vector(&self, dense: &[u32]) -> DescriptorVector {
        DescriptorVector::from_dense(&self.descriptors, dense)
    }

    pub fn to_dense(&self, n: &DescriptorVector) -> Vec<u32> {
        n.to_dense(&self.descriptors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimality {
    /// Branch-and-bound closed with valid bounds.
    Proven,
    /// Exhaustive scan of the feasible set.
    Enumerated,
    /// Best point seen by a metaheuristic.
    Heuristic,
}

impl fmt::Display for Optimality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimality::Proven => "proven",
            Optimality::Enumerated => "enumerated",
            Optimality::Heuristic => "heuristic",
        })
    }
}

/// Signed deviations from a target: `plus − minus = target − p`, at most one nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetDeviation {
    pub plus: f64,
    pub minus: f64,
}

impl TargetDeviation {
    pub fn new(target: f64, p: f64) -> Self {
        let gap = target - p;
        Self { plus: gap.max(0.0), minus: (-gap).max(0.0) }
    }
}

#[derive(Debug, Clone)]
pub struct DesignSolution {
    pub n: DescriptorVector,
    pub p: Vec<f64>,
    pub objective: f64,
    pub optimality: Optimality,
    /// Filled in target mode.
    pub deviations: Vec<TargetDeviation>,
    pub structures: Vec<MolecularGraph>,
}
