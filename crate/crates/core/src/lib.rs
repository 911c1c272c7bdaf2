//! Construction and numerical verification of special Lagrangian
//! immersions in complex space built from plane curves, Legendrian factors
//! and SU(n)-orbits, together with the associated quasilinear elliptic
//! Dirichlet problem.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod ambient;
pub mod curves;
pub mod error;
pub mod legendrian;
pub mod matrix_orbits;
pub mod numeric;
pub mod pde;
pub mod surfaces;

pub use error::{Error, Result};

/// A point or vector of C^2.
pub type C2 = [num_complex::Complex64; 2];
