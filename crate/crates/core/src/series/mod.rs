//! Truncated power-series (jet) arithmetic in one variable and in two
//! variables `(y, μ)`.
//!
//! All derivatives consumed by the AIM recursion come from here: a smooth
//! function is represented by its Taylor coefficients about a fixed center,
//! and each differentiation consumes one order.

mod scalar;
mod series1;
mod series2;

use thiserror::Error;

pub use scalar::{
    Precision, Scalar, DOUBLE_DIGITS, EXTENDED_DIGITS, EXTENDED_ITERATION_THRESHOLD,
};
pub use series1::Series1;
pub use series2::Series2;

/// Multiprecision scalar.
pub type Mp = rug::Float;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series centers differ ({left} vs {right})")]
    CenterMismatch { left: f64, right: f64 },
    #[error("μ-orders differ ({left} vs {right})")]
    MuOrderMismatch { left: usize, right: usize },
    #[error("divisor constant term {constant:e} is below the singular threshold {threshold:e}")]
    SingularDivision { constant: f64, threshold: f64 },
    #[error("series order exhausted")]
    OrderExhausted,
    #[error("μ-slice {k} out of range (max {max})")]
    SliceOutOfRange { k: usize, max: usize },
    #[error("a series needs at least one coefficient")]
    Empty,
}

/// The operations the AIM recursion needs from a jet type.
///
/// The "order" is always the order in the expansion variable `y`; a second
/// variable, when present, rides along at fixed order.
pub trait Jet: Clone + Sized {
    type Scalar: Scalar;

    fn order(&self) -> usize;
    fn add(&self, other: &Self) -> Result<Self, SeriesError>;
    fn sub(&self, other: &Self) -> Result<Self, SeriesError>;
    /// Product truncated to y-order `order`.
    fn mul_to(&self, other: &Self, order: usize) -> Result<Self, SeriesError>;
    fn derivative(&self) -> Result<Self, SeriesError>;
    fn truncate(&self, order: usize) -> Self;
    fn scale(&self, c: &Self::Scalar) -> Self;
    /// Largest magnitude among the coefficients at `y = center`.
    fn center_magnitude(&self) -> Self::Scalar;
    fn is_finite(&self) -> bool;
}
