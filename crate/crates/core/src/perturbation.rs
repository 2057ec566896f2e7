//! Perturbation theory in `μ = B` with `a = A/(2B)` held fixed.
//!
//! With `A = 2aB` the transformed equation reads
//!
//! ```text
//! f'' = 2(σy/(1−y²) − μ) f' + ((2(a+σ)μy − ω)/(1−y²)) f
//! ```
//!
//! and `ω = ω⁽⁰⁾ + μω⁽¹⁾ + μ²ω⁽²⁾ + …`. Running the AIM recursion over
//! bivariate jets in `(y, μ)` gives the μ-slices `δ⁽ᵏ⁾` of the termination
//! quantity; each `δ⁽ᵏ⁾ = 0` is affine in `ω⁽ᵏ⁾` once the lower orders are
//! fixed.

use serde::Serialize;
use thiserror::Error;

use crate::aim::{iterate_jets, AimError, AimSequence};
use crate::series::{Precision, Scalar, Series1, Series2, SeriesError};
use crate::well::{self, stable_roots, WellError, WellParams, WellProblem};

/// Highest correction order solved for.
pub const K_MAX: usize = 2;

/// Agreement between consecutive depths that counts as stabilized.
pub const STABLE_TOL: f64 = 1e-10;

/// Bound on the relative nonlinearity residual of an affine solve.
pub const AFFINE_TOL: f64 = 1e-8;

const EXTRA_DEPTH: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error("B = 0 leaves a = A/(2B) undefined")]
    ZeroB,
    #[error("g₃({n}, {sigma}) vanishes")]
    Pole { n: usize, sigma: f64 },
    #[error("order-{order} equation is degenerate (slope {slope:e})")]
    Degenerate { order: usize, slope: f64 },
    #[error("order-{order} equation is not affine (relative residual {residual:e})")]
    NotAffine { order: usize, residual: f64 },
    #[error("corrections for level {level} did not stabilize by depth {depth}")]
    Unstable { level: usize, depth: usize },
    #[error("grid point y = {0} is outside the series' region of validity")]
    OutsideRadius(f64),
    #[error(transparent)]
    Well(#[from] WellError),
    #[error(transparent)]
    Aim(#[from] AimError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The model in the `(σ, a)` parameterization, at working precision.
#[derive(Debug, Clone)]
pub struct PerturbModel<T> {
    gamma: f64,
    b: f64,
    sigma: T,
    a: T,
    y0: T,
    coupling: bool,
}

impl<T: Scalar> PerturbModel<T> {
    /// `σ = γ + 3/2` with `a` fixed; `b` is the coupling value at which energies are reported.
    pub fn new(gamma: f64, a: f64, b: f64, y0: f64, precision: Precision) -> Result<Self, PerturbError> {
        WellParams::new(0.0, 0.0, gamma)?;
        if !(y0.abs() < 1.0) {
            return Err(WellError::SingularCenter(y0).into());
        }
        let y0 = T::with_precision(y0, precision);
        let sigma = y0.lift(gamma) + &y0.lift(1.5);
        let a = y0.lift(a);
        Ok(PerturbModel { gamma, b, sigma, a, y0, coupling: true })
    }

    /// The model for a concrete `(A, B, γ)`; requires `B ≠ 0`.
    pub fn from_params(p: &WellParams, y0: f64, precision: Precision) -> Result<Self, PerturbError> {
        let a = p.derived().a_over_2b.ok_or(PerturbError::ZeroB)?;
        Self::new(p.gamma, a, p.b, y0, precision)
    }

    /// Drops every μ-dependent term, leaving the `B = 0` problem at all orders.
    pub fn without_coupling(mut self) -> Self {
        self.coupling = false;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn sigma(&self) -> &T {
        &self.sigma
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    /// λ₀ and s₀ as bivariate jets of y-order `order` and μ-order [`K_MAX`],
    /// with `ω(μ) = omegas[0] + μ omegas[1] + μ² omegas[2]`.
    pub fn seeds(&self, omegas: &[T; 3], order: usize) -> Result<(Series2<T>, Series2<T>), PerturbError> {
        let c = self.y0.clone();
        let zero = c.zero_like();
        let (lam, s_free) = well::to_aim(&self.sigma, &zero, &zero, &c.one_like(), &c, order)?;
        // s_free = −1/(1−y²)
        let inv = s_free.neg();
        let y = Series1::variable(c.clone(), order);

        let mut l0 = Series2::from_series1(&lam, K_MAX);
        let mut s0 = Series2::zero(c.clone(), order, K_MAX);
        let mut rows = vec![inv.scale(&-omegas[0].clone())];
        if self.coupling {
            *l0.at_mut(0, 1) -= &c.lift(2.0);
            let two_a_s = c.lift(2.0) * &(self.a.clone() + &self.sigma);
            let lin = y.scale(&two_a_s).sub(&Series1::constant(omegas[1].clone(), c.clone(), order))?;
            rows.push(lin.mul(&inv)?);
        } else {
            rows.push(inv.scale(&-omegas[1].clone()));
        }
        rows.push(inv.scale(&-omegas[2].clone()));
        for (k, row) in rows.iter().enumerate() {
            for (j, v) in row.coeffs().iter().enumerate() {
                *s0.at_mut(j, k) = v.clone();
            }
        }
        Ok((l0, s0))
    }

    /// The AIM sequence over `(y, μ)` jets up to depth `n`.
    pub fn sequence(&self, omegas: &[T; 3], n: usize) -> Result<AimSequence<Series2<T>>, PerturbError> {
        self.sequence_with_order(omegas, n, n + 2)
    }

    /// [`PerturbModel::sequence`] seeded at y-order `order`, leaving
    /// `order − n` orders in λₙ and sₙ (for [`eigenfunction_corrections`]).
    pub fn sequence_with_order(
        &self,
        omegas: &[T; 3],
        n: usize,
        order: usize,
    ) -> Result<AimSequence<Series2<T>>, PerturbError> {
        let (l0, s0) = self.seeds(omegas, order)?;
        Ok(iterate_jets(l0, s0, n, false)?)
    }
}

/// `δₙ⁽⁰⁾ … δₙ⁽ᴷ⁾` as series in `y` about `y₀`, for the given ω-expansion.
pub fn delta_corrections<T: Scalar>(
    model: &PerturbModel<T>,
    omegas: &[T; 3],
    n: usize,
) -> Result<Vec<Series1<T>>, PerturbError> {
    let delta = model.sequence(omegas, n)?.delta_jet(n)?;
    (0..=K_MAX).map(|k| delta.slice_mu(k).map_err(PerturbError::from)).collect()
}

fn delta_slice_at<T: Scalar>(model: &PerturbModel<T>, omegas: &[T; 3], n: usize, k: usize) -> Result<T, PerturbError> {
    let d = delta_corrections(model, omegas, n)?;
    Ok(d[k].value().clone())
}

/// Root of the affine map `t ↦ δ⁽ᵏ⁾` with `omegas[k] = t`, from evaluations at
/// `t = 0` and `t = 1`, checked at `t = 2`.
fn affine_solve<T: Scalar>(model: &PerturbModel<T>, omegas: &[T; 3], n: usize, k: usize) -> Result<T, PerturbError> {
    let at = |t: f64| {
        let mut w = omegas.clone();
        w[k] = model.y0.lift(t);
        delta_slice_at(model, &w, n, k)
    };
    let c0 = at(0.0)?;
    let c1 = at(1.0)?;
    let c2 = at(2.0)?;
    let slope = c1.clone() - &c0;
    let scale = {
        let (a, b) = (c0.abs(), slope.abs());
        if a > b { a } else { b }
    };
    if slope.is_zero() || slope.abs() <= scale.clone() * &c0.division_threshold() {
        return Err(PerturbError::Degenerate { order: k, slope: slope.to_f64() });
    }
    let predicted = c0.clone() + &(slope.clone() * &c0.lift(2.0));
    let residual = ((c2 - &predicted).abs() / &scale).to_f64();
    if residual > AFFINE_TOL {
        return Err(PerturbError::NotAffine { order: k, residual });
    }
    Ok(-(c0 / &slope))
}

/// The result of the order-by-order solve for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbSeries<T> {
    pub level: usize,
    pub omega0: T,
    pub omega1: T,
    pub omega2: T,
    /// The expansion parameter; always `B` for this model.
    pub expansion_parameter: &'static str,
    /// `(γ+1)² + ω⁽⁰⁾ + Bω⁽¹⁾ + B²ω⁽²⁾`.
    pub energy_p: T,
    /// Depth at which the corrections stabilized.
    pub depth: usize,
}

/// ω⁽⁰⁾, ω⁽¹⁾, ω⁽²⁾ for level `n` by solving `δ⁽ᵏ⁾ = 0` order by order.
///
/// ω⁽⁰⁾ is the `(n+1)`-th stabilized root of the `μ = 0` problem. The two
/// corrections are recomputed at increasing depth until consecutive depths
/// agree to [`STABLE_TOL`].
pub fn solve_corrections<T: Scalar>(model: &PerturbModel<T>, n: usize) -> Result<PerturbSeries<T>, PerturbError> {
    let precision = model.y0.precision();
    let free = WellParams::new(0.0, 0.0, model.gamma)?;
    let unperturbed = WellProblem::<T>::new(free, model.y0.to_f64(), precision, n)?;
    let roots = stable_roots(&unperturbed, n.max(1), n + 1, false)?;
    let omega0 = polish_root(model, roots[n].clone(), n.max(1) + 1)?;

    let zero = model.y0.zero_like();
    let mut prev: Option<(T, T)> = None;
    let start = n.max(1) + 1;
    for depth in start..=(start + EXTRA_DEPTH) {
        let omega1 = affine_solve(model, &[omega0.clone(), zero.clone(), zero.clone()], depth, 1)?;
        let omega2 = affine_solve(model, &[omega0.clone(), omega1.clone(), zero.clone()], depth, 2)?;
        if let Some((p1, p2)) = &prev {
            if close(p1, &omega1) && close(p2, &omega2) {
                let b = model.y0.lift(model.b);
                let g1 = model.y0.lift(model.gamma) + &model.y0.one_like();
                let energy_p = g1.clone() * &g1 + &omega0 + &(b.clone() * &omega1) + &(b.clone() * &b * &omega2);
                return Ok(PerturbSeries {
                    level: n,
                    omega0,
                    omega1,
                    omega2,
                    expansion_parameter: "B",
                    energy_p,
                    depth,
                });
            }
        }
        prev = Some((omega1, omega2));
    }
    Err(PerturbError::Unstable { level: n, depth: start + EXTRA_DEPTH })
}

/// Secant refinement of a root of `δ⁽⁰⁾` at `depth` to working precision.
fn polish_root<T: Scalar>(model: &PerturbModel<T>, start: T, depth: usize) -> Result<T, PerturbError> {
    let zero = start.zero_like();
    let f = |w: &T| delta_slice_at(model, &[w.clone(), zero.clone(), zero.clone()], depth, 0);
    let scale = scale_of(&start);
    let eps = scale.clone() * &start.division_threshold();
    let mut x0 = start.clone();
    let mut x1 = start.clone() + &(scale * &start.lift(1e-9));
    let (mut f0, mut f1) = (f(&x0)?, f(&x1)?);
    for _ in 0..12 {
        let denom = f1.clone() - &f0;
        if denom.is_zero() || f1.is_zero() {
            break;
        }
        let x2 = x1.clone() - &(f1.clone() * &(x1.clone() - &x0) / &denom);
        let step = (x2.clone() - &x1).abs();
        x0 = std::mem::replace(&mut x1, x2);
        f0 = std::mem::replace(&mut f1, f(&x1)?);
        if step <= eps {
            break;
        }
    }
    // keep the bracketed estimate if the secant wandered off
    if (x1.clone() - &start).abs() > start.lift(1e-6) * &scale_of(&start) {
        return Ok(start);
    }
    Ok(x1)
}

fn close<T: Scalar>(a: &T, b: &T) -> bool {
    (a.clone() - b).abs() <= scale_of(a) * &a.lift(STABLE_TOL)
}

/// `max(|x|, 1)`.
fn scale_of<T: Scalar>(x: &T) -> T {
    let one = x.one_like();
    let a = x.abs();
    if a > one { a } else { one }
}

/// `ωₙ⁽⁰⁾ = n(n−1) + 2nσ`.
pub fn omega0_formula(n: usize, sigma: f64) -> f64 {
    let n = n as f64;
    n * (n - 1.0) + 2.0 * n * sigma
}

/// The polynomials entering the second-order correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GTriple {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl GTriple {
    pub fn new(n: usize, sigma: f64) -> Self {
        let n = n as f64;
        let s = sigma;
        GTriple {
            g1: 2.0 * s * s - (2.0 * n + 5.0) * s - (n * n - n - 3.0),
            g2: 2.0 * s.powi(4)
                + (6.0 * n - 5.0) * s.powi(3)
                + (7.0 * n * n - 11.0 * n + 3.0) * s * s
                + 4.0 * n * (n - 1.0).powi(2) * s
                + n * n * (n - 1.0).powi(2),
            g3: (2.0 * s + 2.0 * n + 1.0) * (2.0 * s + 2.0 * n - 3.0) * (s + n) * (s + n - 1.0),
        }
    }
}

fn g_triple(n: usize, sigma: f64) -> Result<GTriple, PerturbError> {
    let g = GTriple::new(n, sigma);
    if g.g3 == 0.0 {
        return Err(PerturbError::Pole { n, sigma });
    }
    Ok(g)
}

/// `ωₙ⁽²⁾ = −2(a²g₁ − g₂)/g₃`.
pub fn omega2_formula(n: usize, sigma: f64, a: f64) -> Result<(f64, GTriple), PerturbError> {
    let g = g_triple(n, sigma)?;
    Ok((-2.0 * (a * a * g.g1 - g.g2) / g.g3, g))
}

/// `ωₙ ≈ ω⁽⁰⁾ − (A²g₁ − 4B²g₂)/(2g₃)`.
pub fn omega_perturbed(n: usize, p: &WellParams) -> Result<f64, PerturbError> {
    let sigma = p.gamma + 1.5;
    Ok(omega0_formula(n, sigma) - second_order(n, p)?)
}

/// `Eₙᵖ ≈ (γ+n+1)² − (A²g₁ − 4B²g₂)/(2g₃)`.
pub fn perturbed_energy(n: usize, p: &WellParams) -> Result<f64, PerturbError> {
    let base = p.gamma + n as f64 + 1.0;
    Ok(base * base - second_order(n, p)?)
}

/// The second-order shift; zero without coupling, even where `g₃` vanishes.
fn second_order(n: usize, p: &WellParams) -> Result<f64, PerturbError> {
    if p.a == 0.0 && p.b == 0.0 {
        return Ok(0.0);
    }
    let g = g_triple(n, p.gamma + 1.5)?;
    Ok((p.a * p.a * g.g1 - 4.0 * p.b * p.b * g.g2) / (2.0 * g.g3))
}

/// Correction factors `fₙ⁽ᵏ⁾(y) = exp(μᵏ · (−∫_{y₀}^{y} αₙ⁽ᵏ⁾))` for
/// `k = 0 … K_MAX`, at each point of `grid_y`; `out[k][i]` is factor `k` at
/// `grid_y[i]`. Their product approximates `f(y)/f(y₀)` at coupling `μ`.
///
/// The μ-slices of `αₙ = sₙ/λₙ` are Taylor series about `y₀`, so every grid
/// point must lie closer to `y₀` than the singular points `±1`.
pub fn eigenfunction_corrections<T: Scalar>(
    seq: &AimSequence<Series2<T>>,
    mu: f64,
    grid_y: &[f64],
) -> Result<Vec<Vec<T>>, PerturbError> {
    let n = seq.n();
    let alpha = seq.esses()[n].div(&seq.lambdas()[n])?;
    let y0 = alpha.center().clone();
    let y0f = y0.to_f64();
    let radius = 1.0 - y0f.abs();
    if let Some(&bad) = grid_y.iter().find(|y| !((*y - y0f).abs() < radius)) {
        return Err(PerturbError::OutsideRadius(bad));
    }
    let mu = y0.lift(mu);
    let mut out = Vec::with_capacity(K_MAX + 1);
    let mut weight = y0.one_like();
    for k in 0..=K_MAX {
        let exponent = alpha.slice_mu(k)?.integral().neg();
        let row = grid_y
            .iter()
            .map(|&y| (weight.clone() * &exponent.eval(&y0.lift(y))).exp())
            .collect();
        out.push(row);
        weight *= &mu;
    }
    Ok(out)
}
