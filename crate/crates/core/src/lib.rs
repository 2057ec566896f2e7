//! Asymptotic iteration method (AIM) for the deformed trigonometric well
//! `V(x) = A cos x + B² sin² x + γ(γ+1)/sin² x` on `(0, π)`.
//!
//! * [`series`]: truncated Taylor-series arithmetic in one and two variables.
//! * [`aim`]: the generic recursion, termination condition, root search and
//!   eigenfunction evaluation.
//! * [`well`]: the model, its AIM form, and the quasi-exact spectra.
//! * [`perturbation`]: order-by-order energy corrections in `B`.
//! * [`oracle`]: finite-difference diagonalization used as an independent check.
//! * [`tables`] and [`report`]: reproduction of the published tables and output formats.

// `!(x > y)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aim;
pub mod oracle;
pub mod perturbation;
pub mod report;
pub mod series;
pub mod tables;
pub mod well;
