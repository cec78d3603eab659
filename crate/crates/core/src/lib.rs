//! Equidistributed point clouds on surfaces from random lines.
//!
//! Lines drawn from the normalized kinematic measure on the space of oriented
//! lines meeting a ball are intersected with a surface; the crossings form a
//! cloud whose density is uniform with respect to surface area. The same
//! line streams estimate areas and surface integrals.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crofton;
pub mod error;
pub mod geometry;
pub mod normals;
pub mod rng;
pub mod samplers;
pub mod stats;
pub mod surfaces;
pub mod vector;

pub use error::{Error, Result};
pub use vector::Vec3;
