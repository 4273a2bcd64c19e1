//! Verification lab for the p-Laplace Lane-Emden-Fowler equation on model manifolds.

// `!(x > 0.0)` is how inputs are checked throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimates;
pub mod exponents;
pub mod fields;
pub mod geometry;
pub mod identities;
pub mod jets;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod reaction;
pub mod sampling;
pub mod real;
pub mod report;
pub mod run;
pub mod shooting;
pub mod taylor;

pub use error::{LabError, Result};
