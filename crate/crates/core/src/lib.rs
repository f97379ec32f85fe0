//! Numerical models of the log-integrable spaces.
//!
//! * [`step`] and [`fnorm`]: the commutative space of functions with
//!   `∫ log(1+|f|) < ∞`, modelled by piecewise-constant functions on
//!   intervals of `[0, ∞)` with Lebesgue measure.
//! * [`operator`]: the noncommutative analogue on `n×n` complex matrices
//!   with the normalized trace `τ = Tr/n`.
//! * [`nevanlinna`]: radial means, boundary values and the Smirnov-class
//!   defect for holomorphic functions on the unit disk.
//! * [`witness`]: constructive counterexamples and convergence mechanics.
//! * [`selftest`]: randomized invariant suites, used by the CLI and CI.

// `!(x > 0.0)` is deliberate: it rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fnorm;
pub mod nevanlinna;
pub mod operator;
pub mod sample;
pub mod selftest;
pub mod step;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use step::{Piece, SingularStep, StepFunction, TotalMeasure};
