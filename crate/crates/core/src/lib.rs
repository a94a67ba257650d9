//! Green functions, Dirichlet solvers and verification oracles for the static
//! Klein-Gordon equation `(Δ - r²)V = 0` on the strip `0 < y < π` and the
//! upper half-plane, and for the general constant-coefficient elliptic
//! operator on strips of width `l` and the half-plane.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod bvp;
pub mod disk;
pub mod error;
pub mod exec;
pub mod fd;
pub mod field;
pub mod general;
pub mod halfplane;
pub mod kernel;
pub mod quadrature;
pub mod report;
pub mod specfun;
pub mod strip;
pub mod verify;

pub use boundary::BoundaryFunction;
pub use bvp::{convolve_kernel, solve_halfplane, solve_halfplane_general, solve_strip, solve_strip_general, BvpProblem};
pub use error::{Error, Result};
pub use exec::Execution;
pub use field::{FieldGrid, GridSpec};
pub use general::{derive_change_of_variables, DerivedChangeOfVariables, EllipticCoefficients};
pub use kernel::{Domain, KernelSlice, KernelSpec, Representation};
pub use report::OracleReport;
