//! The deformed trigonometric well
//! `V(x) = A cos x + B² sin² x + γ(γ+1)/sin² x` on `(0, π)`.
//!
//! With `Ψ(x) = sin^{γ+1}(x) e^{B cos x} f(x)` and `y = cos x` the
//! Schrödinger equation becomes
//!
//! ```text
//! f'' = 2(σy/(1−y²) − B) f' + ((ξy − ω)/(1−y²)) f
//! ```
//!
//! with `σ = γ + 3/2`, `ξ = A + 2σB` and `ω = E − (γ+1)²`. When `ξ = −2nB`
//! the equation has polynomial solutions of degree `n`, giving `n + 1`
//! algebraic levels (the quasi-exact spectrum).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aim::{self, AimError, AimProblem, ScanSettings};
use crate::series::{Precision, Scalar, Series1};

/// Default evaluation point `y₀`.
pub const DEFAULT_Y0: f64 = 0.5;

/// Default lower end of the ω scan.
pub const DEFAULT_SCAN_LO: f64 = -5.0;

/// Default ω scan step.
pub const DEFAULT_SCAN_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WellError {
    #[error("γ must be finite and non-negative, got {0}")]
    NegativeGamma(f64),
    #[error("x = {0} is outside the open interval (0, π)")]
    OutsideDomain(f64),
    #[error("evaluation point y₀ = {0} must satisfy |y₀| < 1")]
    SingularCenter(f64),
    #[error("B = 0 leaves a = A/(2B) undefined")]
    ZeroB,
    #[error("quasi-exact level {n}: found {found} stabilized roots, expected {expected}")]
    QuasiInconsistent { n: usize, found: usize, expected: usize },
    #[error(transparent)]
    Aim(#[from] AimError),
}

/// Potential parameters `(A, B, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub gamma: f64,
}

impl WellParams {
    pub fn new(a: f64, b: f64, gamma: f64) -> Result<Self, WellError> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(WellError::NegativeGamma(gamma));
        }
        Ok(WellParams { a, b, gamma })
    }

    pub fn derived(&self) -> DerivedParams {
        let sigma = self.gamma + 1.5;
        DerivedParams {
            sigma,
            xi: self.a + 2.0 * sigma * self.b,
            a_over_2b: if self.b != 0.0 { Some(self.a / (2.0 * self.b)) } else { None },
        }
    }

    /// `(γ + 1)²`, the offset between `E` and `ω`.
    pub fn energy_offset(&self) -> f64 {
        (self.gamma + 1.0) * (self.gamma + 1.0)
    }
}

/// `σ = γ + 3/2`, `ξ = A + 2σB` and `a = A/(2B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub sigma: f64,
    pub xi: f64,
    /// `None` when `B = 0`.
    pub a_over_2b: Option<f64>,
}

/// `V(x) = A cos x + B² sin² x + γ(γ+1)/sin² x`.
pub fn potential(x: f64, p: &WellParams) -> Result<f64, WellError> {
    if !(x > 0.0 && x < PI) {
        return Err(WellError::OutsideDomain(x));
    }
    let s2 = x.sin().powi(2);
    Ok(p.a * x.cos() + p.b * p.b * s2 + p.gamma * (p.gamma + 1.0) / s2)
}

/// `E = ω + (γ+1)²`.
pub fn energy_from_omega<T: Scalar>(omega: &T, gamma: f64) -> T {
    let g1 = omega.lift(gamma) + &omega.one_like();
    omega.clone() + &(g1.clone() * &g1)
}

/// `ω = E − (γ+1)²`.
pub fn omega_from_energy<T: Scalar>(energy: &T, gamma: f64) -> T {
    let g1 = energy.lift(gamma) + &energy.one_like();
    energy.clone() - &(g1.clone() * &g1)
}

/// `Ψ(x) = sin^{γ+1}(x) e^{B cos x} f(x)`.
pub fn psi(x: f64, p: &WellParams, f_value: f64) -> Result<f64, WellError> {
    if !(x > 0.0 && x < PI) {
        return Err(WellError::OutsideDomain(x));
    }
    Ok(x.sin().powf(p.gamma + 1.0) * (p.b * x.cos()).exp() * f_value)
}

/// The `A` that makes level `n` quasi-exact: `ξ = −2nB`, i.e.
/// `A = −2B(n + γ + 3/2)`.
pub fn quasi_a(n: usize, gamma: f64, b: f64) -> f64 {
    -2.0 * b * (n as f64 + gamma + 1.5)
}

/// The two `n = 1` quasi-exact energies
/// `(γ+3/2)² + 1/4 ∓ √((γ+3/2)² + 4B²)`, lower root first.
pub fn closed_form_n1(gamma: f64, b: f64) -> (f64, f64) {
    let s = gamma + 1.5;
    let base = s * s + 0.25;
    let root = (s * s + 4.0 * b * b).sqrt();
    (base - root, base + root)
}

/// The well in AIM form, with ω as the eigenvalue parameter.
#[derive(Debug, Clone)]
pub struct WellProblem<T> {
    params: WellParams,
    y0: T,
    sigma: T,
    xi: T,
    b: T,
    scan: ScanSettings,
}

impl<T: Scalar> WellProblem<T> {
    /// The problem for `params` evaluated at `y0`, scanning ω over the default
    /// bracket for levels up to `top_level`.
    pub fn new(params: WellParams, y0: f64, precision: Precision, top_level: usize) -> Result<Self, WellError> {
        let seed = T::with_precision(y0, precision);
        let sigma = seed.lift(params.gamma) + &seed.lift(1.5);
        let b = seed.lift(params.b);
        let xi = seed.lift(params.a) + &(seed.lift(2.0) * &sigma * &b);
        Self::build(params, seed, sigma, xi, b, top_level)
    }

    /// The quasi-exact problem of degree `n`: `ξ` is set to exactly `−2nB`.
    pub fn quasi_exact(n: usize, gamma: f64, b: f64, y0: f64, precision: Precision) -> Result<Self, WellError> {
        let params = WellParams::new(quasi_a(n, gamma, b), b, gamma)?;
        let seed = T::with_precision(y0, precision);
        let sigma = seed.lift(gamma) + &seed.lift(1.5);
        let bb = seed.lift(b);
        let xi = seed.lift(-2.0 * n as f64) * &bb;
        Self::build(params, seed, sigma, xi, bb, n)
    }

    fn build(params: WellParams, y0: T, sigma: T, xi: T, b: T, top_level: usize) -> Result<Self, WellError> {
        let y0f = y0.to_f64();
        if !(y0f.abs() < 1.0) {
            return Err(WellError::SingularCenter(y0f));
        }
        let scan = ScanSettings::new(default_scan_lo(&params), default_scan_hi(top_level, params.gamma), DEFAULT_SCAN_STEP)?;
        Ok(WellProblem { params, y0, sigma, xi, b, scan })
    }

    pub fn with_scan(mut self, scan: ScanSettings) -> Self {
        self.scan = scan;
        self
    }

    pub fn params(&self) -> &WellParams {
        &self.params
    }

    pub fn sigma(&self) -> &T {
        &self.sigma
    }

    pub fn xi(&self) -> &T {
        &self.xi
    }
}

/// `(n_top + γ + 2)² + 20`.
/// Lower end of the default ω scan. Every level has `E > min V ≥ −|A| + γ(γ+1)`,
/// so `ω > −|A| − γ − 1`; the scan starts one unit below that (or at
/// [`DEFAULT_SCAN_LO`] if lower).
pub fn default_scan_lo(p: &WellParams) -> f64 {
    DEFAULT_SCAN_LO.min(-p.a.abs() - p.gamma - 2.0)
}

pub fn default_scan_hi(top_level: usize, gamma: f64) -> f64 {
    let t = top_level as f64 + gamma + 2.0;
    t * t + 20.0
}

/// λ₀ and s₀ of the transformed equation about `center`, for trial ω.
pub fn to_aim<T: Scalar>(sigma: &T, xi: &T, b: &T, omega: &T, center: &T, order: usize) -> Result<(Series1<T>, Series1<T>), WellError> {
    let c = center.to_f64();
    if !(c.abs() < 1.0) {
        return Err(WellError::SingularCenter(c));
    }
    let one = center.one_like();
    let two = center.lift(2.0);
    let y = Series1::variable(center.clone(), order);
    let mut w = vec![center.zero_like(); order + 1];
    w[0] = one.clone() - &(center.clone() * center);
    if order >= 1 {
        w[1] = -(two.clone() * center);
    }
    if order >= 2 {
        w[2] = -one.clone();
    }
    let one_minus_y2 = Series1::from_coeffs(center.clone(), w).map_err(AimError::from)?;
    let inv = Series1::constant(one, center.clone(), order).div(&one_minus_y2).map_err(AimError::from)?;

    let lambda0 = y
        .scale(sigma)
        .mul(&inv)
        .and_then(|t| t.sub(&Series1::constant(b.clone(), center.clone(), order)))
        .map(|t| t.scale(&two))
        .map_err(AimError::from)?;
    let numerator = y
        .scale(xi)
        .sub(&Series1::constant(omega.clone(), center.clone(), order))
        .map_err(AimError::from)?;
    let s0 = numerator.mul(&inv).map_err(AimError::from)?;
    Ok((lambda0, s0))
}

impl<T: Scalar> AimProblem<T> for WellProblem<T> {
    fn seed_at(&self, trial: &T, center: &T, order: usize) -> Result<(Series1<T>, Series1<T>), AimError> {
        to_aim(&self.sigma, &self.xi, &self.b, trial, center, order).map_err(|e| match e {
            WellError::Aim(a) => a,
            other => AimError::InvalidProblem(other.to_string()),
        })
    }

    fn center(&self) -> T {
        self.y0.clone()
    }

    fn param_name(&self) -> &str {
        "ω"
    }

    fn scan(&self) -> ScanSettings {
        self.scan
    }

    fn singularities(&self) -> Vec<f64> {
        vec![-1.0, 1.0]
    }

    fn regular_solution_at(&self, trial: &T, point: f64, order: usize) -> Option<Vec<T>> {
        if point == 1.0 {
            Some(regular_series(&self.sigma, &self.xi, &self.b, trial, order))
        } else if point == -1.0 {
            // f(y) = g(−y), where g solves the equation with B and ξ negated
            let g = regular_series(&self.sigma, &-self.xi.clone(), &-self.b.clone(), trial, order);
            Some(g.into_iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { c }).collect())
        } else {
            None
        }
    }
}

/// Coefficients `c_k` of the solution `Σ c_k (y − 1)^k`, `c_0 = 1`, that is
/// analytic at `y = 1`:
///
/// ```text
/// 2(k+1)(k+σ) c_{k+1} = −(k(k−1) + 2σk + 4Bk + ξ − ω) c_k − (2B(k−1) + ξ) c_{k−1}
/// ```
pub fn regular_series<T: Scalar>(sigma: &T, xi: &T, b: &T, omega: &T, order: usize) -> Vec<T> {
    let mut c = Vec::with_capacity(order + 1);
    c.push(sigma.one_like());
    let mut prev = sigma.zero_like();
    for k in 0..order {
        let kf = sigma.lift(k as f64);
        let km1 = sigma.lift(k as f64 - 1.0);
        let two = sigma.lift(2.0);
        let lin = kf.clone() * &km1 + &(two.clone() * sigma * &kf) + &(sigma.lift(4.0) * b * &kf) + xi - omega;
        let back = two.clone() * b * &km1 + xi;
        let num = -(lin * &c[k]) - &(back * &prev);
        let den = two * &sigma.lift((k + 1) as f64) * &(kf + sigma);
        prev = c[k].clone();
        c.push(num / &den);
    }
    c
}

/// One algebraic level `(n, k)` of the quasi-exact spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiExactLevel<T> {
    pub n: usize,
    pub k: usize,
    pub a_required: f64,
    pub omega: T,
    pub energy: T,
}

/// Relative agreement needed for a root to count as stabilized across depths.
pub const QUASI_STABLE_TOL: f64 = 1e-10;

/// Deepest termination index tried past `max(n, 1)`.
const QUASI_EXTRA_DEPTH: usize = 8;

/// The `n + 1` quasi-exact levels at `ξ = −2nB`, ascending in ω.
///
/// Roots of δ at successive depths are compared; the ones that persist (to
/// [`QUASI_STABLE_TOL`]) are the algebraic levels.
pub fn quasi_spectrum<T: Scalar>(
    n: usize,
    gamma: f64,
    b: f64,
    y0: f64,
    precision: Precision,
) -> Result<Vec<QuasiExactLevel<T>>, WellError> {
    let problem = WellProblem::<T>::quasi_exact(n, gamma, b, y0, precision)?;
    quasi_spectrum_for(&problem, n)
}

/// [`quasi_spectrum`] on a prepared problem (e.g. with a custom scan).
pub fn quasi_spectrum_for<T: Scalar>(problem: &WellProblem<T>, n: usize) -> Result<Vec<QuasiExactLevel<T>>, WellError> {
    let stable = stable_roots(problem, n.max(1), n + 1, true)?;
    let gamma = problem.params().gamma;
    let a_required = problem.params().a;
    Ok(stable
        .into_iter()
        .enumerate()
        .map(|(k, omega)| QuasiExactLevel { n, k, a_required, energy: energy_from_omega(&omega, gamma), omega })
        .collect())
}

/// Roots of δ that persist from one depth to the next (to [`QUASI_STABLE_TOL`]),
/// ascending, starting at depth `start`.
///
/// Stops at the first depth pair giving exactly `want` stable roots, or at
/// least `want` when `exact` is false.
pub fn stable_roots<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    start: usize,
    want: usize,
    exact: bool,
) -> Result<Vec<T>, WellError> {
    let mut found = 0;
    let mut prev = aim::find_roots(problem, start)?;
    for depth in (start + 1)..=(start + QUASI_EXTRA_DEPTH) {
        let next = aim::find_roots(problem, depth)?;
        let stable: Vec<T> = prev
            .iter()
            .filter(|r| next.iter().any(|s| within_rel(*r, s, QUASI_STABLE_TOL)))
            .cloned()
            .collect();
        found = stable.len();
        if found == want || (!exact && found > want) {
            return Ok(stable);
        }
        prev = next;
    }
    Err(WellError::QuasiInconsistent { n: want.saturating_sub(1), found, expected: want })
}

pub(crate) fn within_rel<T: Scalar>(a: &T, b: &T, tol: f64) -> bool {
    let one = a.one_like();
    let scale = if a.abs() > one { a.abs() } else { one };
    (a.clone() - b).abs() <= scale * &a.lift(tol)
}
