//! Exact dyadic harmonic analysis on adaptive step functions.
//!
//! Functions live on the root cube `[0,1)^n` and are constant on the leaves
//! of a finite dyadic partition. Every operator here (Haar shifts, the
//! dyadic square and maximal functions, paraproducts, Orlicz maximal
//! functions) is evaluated exactly on that representation, and all suprema
//! over cubes are taken over the dyadic cubes of the partition tree.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cube;
pub mod error;
pub mod experiments;
pub mod haar;
pub mod operators;
pub mod oscillation;
pub mod step;
pub mod weights;

mod accumulate;

pub use cube::DyadicCube;
pub use error::{Error, Result};
pub use haar::{haar_coefficient, haar_coefficients, haar_reconstruct};
pub use step::{common_refinement, StepFunction};
