//! Group-contribution property models.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::descriptor::DescriptorVector;
use crate::graph::GroupLibrary;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcError {
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("{transform} is undefined at {value}")]
    TransformDomain { transform: String, value: f64 },
    #[error("group `{group}` belongs to level {actual}, supplied as level {supplied}")]
    LevelMismatch { group: String, actual: Level, supplied: Level },
    #[error("{rows} rows cannot determine {cols} coefficients")]
    Underdetermined { rows: usize, cols: usize },
    #[error("design matrix is rank deficient")]
    SingularDesignMatrix,
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// Outer function applied to the inner sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Identity,
    Exp,
    Log,
    Reciprocal,
    /// `a * x + b`
    Affine { a: f64, b: f64 },
}

impl Transform {
    pub fn apply(self, x: f64) -> Result<f64, GcError> {
        let domain = |value| Err(GcError::TransformDomain { transform: self.to_string(), value });
        match self {
            Transform::Identity => Ok(x),
            Transform::Exp => Ok(x.exp()),
            Transform::Log if x > 0.0 => Ok(x.ln()),
            Transform::Log => domain(x),
            Transform::Reciprocal if x != 0.0 => Ok(1.0 / x),
            Transform::Reciprocal => domain(x),
            Transform::Affine { a, b } => Ok(a * x + b),
        }
    }

    /// Maps an observed property back to the inner-sum scale.
    pub fn invert(self, p: f64) -> Result<f64, GcError> {
        let domain = |value| Err(GcError::TransformDomain { transform: format!("inverse of {self}"), value });
        match self {
            Transform::Identity => Ok(p),
            Transform::Exp if p > 0.0 => Ok(p.ln()),
            Transform::Exp => domain(p),
            Transform::Log => Ok(p.exp()),
            Transform::Reciprocal if p != 0.0 => Ok(1.0 / p),
            Transform::Reciprocal => domain(p),
            Transform::Affine { a, b } if a != 0.0 => Ok((p - b) / a),
            Transform::Affine { .. } => domain(p),
        }
    }

    /// `Some((scale, offset))` when the transform is affine in the inner sum.
    pub fn as_affine(self) -> Option<(f64, f64)> {
        match self {
            Transform::Identity => Some((1.0, 0.0)),
            Transform::Affine { a, b } => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => f.write_str("identity"),
            Transform::Exp => f.write_str("exp"),
            Transform::Log => f.write_str("log"),
            Transform::Reciprocal => f.write_str("reciprocal"),
            Transform::Affine { a, b } => write!(f, "affine {a} {b}"),
        }
    }
}

impl FromStr for Transform {
    type Err = GcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.as_slice() {
            ["identity"] => Ok(Transform::Identity),
            ["exp"] => Ok(Transform::Exp),
            ["log"] => Ok(Transform::Log),
            ["reciprocal"] => Ok(Transform::Reciprocal),
            ["affine", a, b] => {
                let num = |t: &str| t.parse::<f64>().map_err(|_| GcError::Invalid(format!("bad number `{t}`")));
                Ok(Transform::Affine { a: num(a)?, b: num(b)? })
            }
            _ => Err(GcError::Invalid(format!("unknown transform `{s}`"))),
        }
    }
}

/// First-, second- or third-order group set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    F,
    S,
    T,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::F => "F",
            Level::S => "S",
            Level::T => "T",
        })
    }
}

impl FromStr for Level {
    type Err = GcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" | "1" => Ok(Level::F),
            "S" | "2" => Ok(Level::S),
            "T" | "3" => Ok(Level::T),
            _ => Err(GcError::Invalid(format!("unknown level `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Combiner {
    Product,
    Min,
    /// 1 when both groups occur, else 0.
    Indicator,
}

impl Combiner {
    pub fn combine(self, a: u32, b: u32) -> f64 {
        match self {
            Combiner::Product => f64::from(a) * f64::from(b),
            Combiner::Min => f64::from(a.min(b)),
            Combiner::Indicator => {
                if a > 0 && b > 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combiner::Product => "product",
            Combiner::Min => "min",
            Combiner::Indicator => "indicator",
        })
    }
}

impl FromStr for Combiner {
    type Err = GcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(Combiner::Product),
            "min" => Ok(Combiner::Min),
            "indicator" => Ok(Combiner::Indicator),
            _ => Err(GcError::Invalid(format!("unknown combiner `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm {
    pub g: String,
    pub g_prime: String,
    pub coefficient: f64,
    pub combiner: Combiner,
}

impl InteractionTerm {
    pub fn product(g: &str, g_prime: &str, coefficient: f64) -> Self {
        Self { g: g.into(), g_prime: g_prime.into(), coefficient, combiner: Combiner::Product }
    }
}

/// `p = f(sum_g c_g n_g + sum_I c_I f_I(n_g, n_g'))`
#[derive(Debug, Clone, PartialEq)]
pub struct GcModel {
    pub property: String,
    pub coefficients: BTreeMap<String, f64>,
    /// Groups absent from this map are first order.
    pub levels: BTreeMap<String, Level>,
    pub transform: Transform,
    pub interactions: Vec<InteractionTerm>,
}

impl GcModel {
    pub fn linear<I, K>(property: &str, coefficients: I) -> Self
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<String>,
    {
        Self {
            property: property.to_string(),
            coefficients: coefficients.into_iter().map(|(k, c)| (k.into(), c)).collect(),
            levels: BTreeMap::new(),
            transform: Transform::Identity,
            interactions: Vec::new(),
        }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    pub fn with_interaction(mut self, term: InteractionTerm) -> Self {
        self.interactions.push(term);
        self
    }

    pub fn coefficient(&self, group: &str) -> f64 {
        self.coefficients.get(group).copied().unwrap_or(0.0)
    }

    pub fn level(&self, group: &str) -> Level {
        self.levels.get(group).copied().unwrap_or(Level::F)
    }

    /// True when the estimate is an affine function of `n`.
    pub fn is_linear(&self) -> bool {
        self.interactions.is_empty() && self.transform.as_affine().is_some()
    }

    /// Every coefficient and interaction group must exist in `lib`.
    pub fn validate_against(&self, lib: &GroupLibrary) -> Result<(), GcError> {
        let names = self.coefficients.keys().chain(self.interactions.iter().flat_map(|t| [&t.g, &t.g_prime]));
        for name in names {
            if lib.get(name).is_none() {
                return Err(GcError::UnknownGroup(name.clone()));
            }
        }
        Ok(())
    }

    fn check_keys(&self, n: &DescriptorVector) -> Result<(), GcError> {
        match n.keys().find(|k| !self.coefficients.contains_key(*k)) {
            Some(k) => Err(GcError::UnknownGroup(k.to_string())),
            None => Ok(()),
        }
    }

    fn interaction_sum(&self, n: &DescriptorVector) -> f64 {
        self.interactions.iter().map(|t| t.coefficient * t.combiner.combine(n.get(&t.g), n.get(&t.g_prime))).sum()
    }

    fn linear_sum(&self, n: &DescriptorVector) -> f64 {
        n.iter().map(|(g, c)| self.coefficient(g) * f64::from(c)).sum()
    }

    /// The untransformed sum.
    pub fn inner_sum(&self, n: &DescriptorVector) -> Result<f64, GcError> {
        self.check_keys(n)?;
        Ok(self.linear_sum(n) + self.interaction_sum(n))
    }
}

pub fn estimate_gc(model: &GcModel, n: &DescriptorVector) -> Result<f64, GcError> {
    model.transform.apply(model.inner_sum(n)?)
}

/// Three-level estimate. Each vector must only name groups of its level;
/// counts are taken as supplied, overlap between levels included.
pub fn estimate_gcplus(
    model: &GcModel,
    n_f: &DescriptorVector,
    n_s: &DescriptorVector,
    n_t: &DescriptorVector,
) -> Result<f64, GcError> {
    let mut inner = 0.0;
    for (supplied, n) in [(Level::F, n_f), (Level::S, n_s), (Level::T, n_t)] {
        model.check_keys(n)?;
        for g in n.keys() {
            let actual = model.level(g);
            if actual != supplied {
                return Err(GcError::LevelMismatch { group: g.to_string(), actual, supplied });
            }
        }
        inner += model.linear_sum(n);
    }
    let merged = n_f.merged(n_s).merged(n_t);
    inner += model.interaction_sum(&merged);
    model.transform.apply(inner)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: GcModel,
    /// Euclidean norm of the residual on the inner-sum scale.
    pub residual_norm: f64,
}

/// Ordinary least squares of the inverse-transformed property on the counts.
pub fn fit_coefficients(
    property: &str,
    dataset: &[(DescriptorVector, f64)],
    transform: Transform,
) -> Result<FitResult, GcError> {
    let mut keys: Vec<String> = dataset.iter().flat_map(|(n, _)| n.keys().map(str::to_string)).collect();
    keys.sort();
    keys.dedup();
    let (rows, cols) = (dataset.len(), keys.len());
    if cols == 0 || rows < cols {
        return Err(GcError::Underdetermined { rows, cols });
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| f64::from(dataset[i].0.get(&keys[j])));
    let y: Vec<f64> = dataset.iter().map(|(_, p)| transform.invert(*p)).collect::<Result<_, _>>()?;
    let y = DVector::from_vec(y);

    let qr = a.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if r.diagonal().iter().any(|d| d.abs() <= 1e-10 * scale.max(1.0)) {
        return Err(GcError::SingularDesignMatrix);
    }
    let qty = qr.q().transpose() * &y;
    let c = r.solve_upper_triangular(&qty).ok_or(GcError::SingularDesignMatrix)?;
    let residual_norm = (&a * &c - &y).norm();

    let model = GcModel {
        property: property.to_string(),
        coefficients: keys.into_iter().zip(c.iter().copied()).collect(),
        levels: BTreeMap::new(),
        transform,
        interactions: Vec::new(),
    };
    Ok(FitResult { model, residual_norm })
}
