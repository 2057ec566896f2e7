//! Real scalar backends for the series kernel.
//!
//! Two backends are provided: native `f64` (the 64-bit default) and
//! [`rug::Float`] at a caller-chosen number of significant decimal digits.
//! Every value derived from a seed value through [`Scalar::lift`] carries the
//! seed's precision, so a single computation never mixes precisions.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::Float;

/// Significant decimal digits carried by `f64`.
pub const DOUBLE_DIGITS: u32 = 16;

/// Minimum digits used once an iteration budget exceeds [`EXTENDED_ITERATION_THRESHOLD`].
pub const EXTENDED_DIGITS: u32 = 50;

/// Iteration counts above this need extended precision.
pub const EXTENDED_ITERATION_THRESHOLD: usize = 20;

/// Working precision in significant decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const DOUBLE: Precision = Precision(DOUBLE_DIGITS);

    /// Precision with `digits` significant decimal digits, clamped to at least 15.
    pub fn digits(digits: u32) -> Self {
        Precision(digits.max(15))
    }

    /// The precision a run with `max_iter` iterations needs, starting from `requested`.
    pub fn for_iterations(requested: u32, max_iter: usize) -> Self {
        if max_iter > EXTENDED_ITERATION_THRESHOLD {
            Precision::digits(requested.max(EXTENDED_DIGITS))
        } else {
            Precision::digits(requested)
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Whether native `f64` arithmetic covers this precision.
    pub fn is_double(self) -> bool {
        self.0 <= DOUBLE_DIGITS
    }

    /// Mantissa bits for the multiprecision backend.
    pub fn bits(self) -> u32 {
        (f64::from(self.0) * std::f64::consts::LOG2_10).ceil() as u32
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DOUBLE
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.0)
    }
}

/// A real number with deterministic arithmetic at a fixed precision.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    /// Builds `x` at the given precision.
    fn with_precision(x: f64, precision: Precision) -> Self;

    fn precision(&self) -> Precision;

    /// `x` at the precision of `self`.
    fn lift(&self, x: f64) -> Self {
        Self::with_precision(x, self.precision())
    }

    fn zero_like(&self) -> Self {
        self.lift(0.0)
    }

    fn one_like(&self) -> Self {
        self.lift(1.0)
    }

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;

    fn is_finite(&self) -> bool;
    fn is_zero(&self) -> bool;

    /// `self += a * b`.
    fn add_mul(&mut self, a: &Self, b: &Self);

    /// `self -= a * b`.
    fn sub_mul(&mut self, a: &Self, b: &Self);

    /// `10^(-digits + 5)`, the default singular-division threshold.
    fn division_threshold(&self) -> Self {
        let exponent = -(self.precision().get() as i32) + 5;
        self.lift(10f64.powi(exponent))
    }

    /// Decimal rendering with every significant digit of the working precision.
    fn to_full_string(&self) -> String;

    /// The largest power of two not above `|self|` (zero for zero; `self`
    /// for non-finite values). Scaling by it is exact.
    fn power_of_two_below(&self) -> Self;
}

impl Scalar for f64 {
    fn with_precision(x: f64, _precision: Precision) -> Self {
        x
    }

    fn precision(&self) -> Precision {
        Precision::DOUBLE
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn to_full_string(&self) -> String {
        format!("{:e}", self)
    }

    fn power_of_two_below(&self) -> Self {
        if *self == 0.0 || !self.is_finite() {
            return *self;
        }
        let a = f64::abs(*self);
        if a < f64::MIN_POSITIVE {
            return f64::MIN_POSITIVE;
        }
        f64::from_bits(a.to_bits() & 0x7ff0_0000_0000_0000)
    }
}

impl Scalar for Float {
    fn with_precision(x: f64, precision: Precision) -> Self {
        Float::with_val(precision.bits(), x)
    }

    fn precision(&self) -> Precision {
        let digits = (f64::from(self.prec()) * std::f64::consts::LOG10_2).floor() as u32;
        Precision(digits)
    }

    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }

    fn abs(&self) -> Self {
        Float::with_val(self.prec(), self.abs_ref())
    }

    fn sqrt(&self) -> Self {
        Float::with_val(self.prec(), self.sqrt_ref())
    }

    fn exp(&self) -> Self {
        Float::with_val(self.prec(), self.exp_ref())
    }

    fn ln(&self) -> Self {
        Float::with_val(self.prec(), self.ln_ref())
    }

    fn is_finite(&self) -> bool {
        Float::is_finite(self)
    }

    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn to_full_string(&self) -> String {
        let digits = self.precision().get() as usize;
        self.to_string_radix(10, Some(digits))
    }

    fn power_of_two_below(&self) -> Self {
        match self.get_exp() {
            // self = m·2^e with 0.5 ≤ |m| < 1
            Some(e) => Float::with_val(self.prec(), Float::i_exp(1, e - 1)),
            None => self.clone(),
        }
    }
}
