//! Computer-aided molecular design: property models over group counts,
//! topological indices and signature descriptors, structural feasibility
//! checks, and optimization drivers.

// Negated float comparisons deliberately treat NaN as failing.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod descriptor;
pub mod feasibility;
pub mod fixtures;
pub mod gc;
pub mod graph;
pub mod io;
pub mod sd;
pub mod solver;
pub mod ti;

pub use descriptor::DescriptorVector;
