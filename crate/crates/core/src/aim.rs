//! The asymptotic iteration method for `f'' = λ₀ f' + s₀ f`.
//!
//! λ₀ and s₀ are carried as jets about a fixed evaluation point `y₀`, so the
//! recursion
//!
//! ```text
//! λₙ = λ'ₙ₋₁ + sₙ₋₁ + λ₀ λₙ₋₁
//! sₙ = s'ₙ₋₁ + s₀ λₙ₋₁
//! ```
//!
//! consumes one jet order per step, and the termination quantity
//! `δₙ = sₙ λₙ₋₁ − λₙ sₙ₋₁` is read off at `y₀`. Eigenvalues are the
//! sign-change roots of `δₙ` as a function of the trial eigenvalue, tracked
//! over increasing `n` until they stabilize.

use thiserror::Error;

use crate::series::{Jet, Scalar, Series1, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AimError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("initial series order {order} is too small for {iterations} iterations (need {needed})")]
    OrderTooSmall { order: usize, iterations: usize, needed: usize },
    #[error("AIM sequence overflowed at iteration {iteration}")]
    Overflow { iteration: usize },
    #[error("termination index {n} out of range 1..={max}")]
    DepthOutOfRange { n: usize, max: usize },
    #[error("δ vanishes at the bracket edge {edge}")]
    RootAtBracketEdge { edge: f64 },
    #[error("level {level} not found: at most {max_roots} roots in the search bracket")]
    LevelNotFound { level: usize, max_roots: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

/// Trial-eigenvalue scan range and step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl ScanSettings {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self, AimError> {
        if !(lo < hi) || !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(AimError::InvalidProblem(format!(
                "bad scan bracket [{lo}, {hi}] with step {step}"
            )));
        }
        Ok(ScanSettings { lo, hi, step })
    }

    /// Grid points `lo, lo + step, …`, ending exactly at `hi`.
    pub fn points(&self) -> Vec<f64> {
        let steps = ((self.hi - self.lo) / self.step).ceil() as usize;
        let mut pts: Vec<f64> = (0..steps).map(|i| self.lo + i as f64 * self.step).collect();
        pts.push(self.hi);
        pts
    }
}

/// A second-order linear ODE eigenvalue problem in AIM form.
pub trait AimProblem<T: Scalar> {
    /// λ₀ and s₀ as jets about `center` for the trial eigenvalue parameter.
    fn seed_at(&self, trial: &T, center: &T, order: usize) -> Result<(Series1<T>, Series1<T>), AimError>;

    /// The evaluation point `y₀`, at working precision.
    fn center(&self) -> T;

    /// Label of the eigenvalue parameter (`"E"` or `"ω"`).
    fn param_name(&self) -> &str;

    fn scan(&self) -> ScanSettings;

    /// Points where λ₀ or s₀ are singular; bounds every expansion radius.
    fn singularities(&self) -> Vec<f64> {
        Vec::new()
    }

    fn seed(&self, trial: &T, order: usize) -> Result<(Series1<T>, Series1<T>), AimError> {
        self.seed_at(trial, &self.center(), order)
    }

    /// `x` at working precision.
    fn lift(&self, x: f64) -> T {
        self.center().lift(x)
    }

    /// Taylor coefficients in `y − point` of the solution that stays analytic
    /// at the regular singular point `point`, or `None` if the problem has no
    /// such expansion.
    fn regular_solution_at(&self, _trial: &T, _point: f64, _order: usize) -> Option<Vec<T>> {
        None
    }
}

/// λ₀…λₙ and s₀…sₙ from the AIM recursion.
#[derive(Debug, Clone)]
pub struct AimSequence<J: Jet> {
    lambdas: Vec<J>,
    esses: Vec<J>,
    rescale_log: J::Scalar,
}

impl<J: Jet> AimSequence<J> {
    /// Number of iterations performed.
    pub fn n(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambdas(&self) -> &[J] {
        &self.lambdas
    }

    pub fn esses(&self) -> &[J] {
        &self.esses
    }

    /// Sum of the natural logs of every joint scale factor divided out.
    pub fn rescale_log(&self) -> &J::Scalar {
        &self.rescale_log
    }

    /// `sₙ λₙ₋₁ − λₙ sₙ₋₁` truncated to y-order zero.
    pub fn delta_jet(&self, n: usize) -> Result<J, AimError> {
        if n == 0 || n > self.n() {
            return Err(AimError::DepthOutOfRange { n, max: self.n() });
        }
        Ok(termination(&self.lambdas[n - 1], &self.esses[n - 1], &self.lambdas[n], &self.esses[n])?)
    }
}

impl<T: Scalar> AimSequence<Series1<T>> {
    /// δₙ at the evaluation point.
    pub fn delta(&self, n: usize) -> Result<T, AimError> {
        Ok(self.delta_jet(n)?.value().clone())
    }

    /// αₙ = sₙ / λₙ as a series about the evaluation point.
    pub fn alpha(&self, n: usize) -> Result<Series1<T>, AimError> {
        if n > self.n() {
            return Err(AimError::DepthOutOfRange { n, max: self.n() });
        }
        Ok(self.esses[n].div(&self.lambdas[n])?)
    }
}

fn termination<J: Jet>(l_prev: &J, s_prev: &J, l: &J, s: &J) -> Result<J, SeriesError> {
    let a = s.mul_to(l_prev, 0)?;
    let b = l.mul_to(s_prev, 0)?;
    a.sub(&b)
}

/// One recursion step, optionally dividing the pair by the power of two at
/// their joint magnitude (exact in binary arithmetic, so rescaled and raw
/// runs round identically). Returns the pair and the factor applied (if any).
fn step<J: Jet>(
    lambda0: &J,
    s0: &J,
    l: &J,
    s: &J,
    rescale: bool,
) -> Result<(J, J, Option<J::Scalar>), SeriesError> {
    let order = l.order() - 1;
    let ln = l.derivative()?.add(&s.truncate(order))?.add(&lambda0.mul_to(l, order)?)?;
    let sn = s.derivative()?.add(&s0.mul_to(l, order)?)?;
    if rescale {
        let ml = ln.center_magnitude();
        let ms = sn.center_magnitude();
        let c = if ml > ms { ml } else { ms }.power_of_two_below();
        if !c.is_zero() && c.is_finite() {
            return Ok((ln.scale(&(c.one_like() / &c)), sn.scale(&(c.one_like() / &c)), Some(c)));
        }
    }
    Ok((ln, sn, None))
}

fn check_order<J: Jet>(lambda0: &J, s0: &J, n_max: usize) -> Result<(), AimError> {
    let order = lambda0.order().min(s0.order());
    let needed = n_max + 2;
    if order < needed {
        return Err(AimError::OrderTooSmall { order, iterations: n_max, needed });
    }
    Ok(())
}

/// Runs `n_max` AIM steps from the given λ₀, s₀ jets.
pub fn iterate_jets<J: Jet>(lambda0: J, s0: J, n_max: usize, rescale: bool) -> Result<AimSequence<J>, AimError> {
    check_order(&lambda0, &s0, n_max)?;
    let mut rescale_log = lambda0.center_magnitude().zero_like();
    let mut lambdas = vec![lambda0.clone()];
    let mut esses = vec![s0.clone()];
    for k in 1..=n_max {
        let (ln, sn, c) = step(&lambda0, &s0, &lambdas[k - 1], &esses[k - 1], rescale)?;
        if !ln.is_finite() || !sn.is_finite() {
            return Err(AimError::Overflow { iteration: k });
        }
        if let Some(c) = c {
            rescale_log += &c.ln();
        }
        lambdas.push(ln);
        esses.push(sn);
    }
    if !rescale_log.is_finite() {
        return Err(AimError::Overflow { iteration: n_max });
    }
    Ok(AimSequence { lambdas, esses, rescale_log })
}

/// δ₁…δ_{n_max} at the evaluation point without keeping the sequence.
pub fn delta_profile<J: Jet>(lambda0: &J, s0: &J, n_max: usize, rescale: bool) -> Result<Vec<J>, AimError> {
    check_order(lambda0, s0, n_max)?;
    let mut out = Vec::with_capacity(n_max);
    let mut l = lambda0.clone();
    let mut s = s0.clone();
    for k in 1..=n_max {
        let (ln, sn, _) = step(lambda0, s0, &l, &s, rescale)?;
        if !ln.is_finite() || !sn.is_finite() {
            return Err(AimError::Overflow { iteration: k });
        }
        out.push(termination(&l, &s, &ln, &sn)?);
        l = ln;
        s = sn;
    }
    Ok(out)
}

/// Runs `n_max` iterations of `problem` at `trial` with initial order `n_max + 2`.
pub fn iterate<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    trial: &T,
    n_max: usize,
) -> Result<AimSequence<Series1<T>>, AimError> {
    iterate_with_order(problem, trial, n_max, n_max + 2, true)
}

/// [`iterate`] with an explicit initial order and rescaling switch.
pub fn iterate_with_order<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    trial: &T,
    n_max: usize,
    order: usize,
    rescale: bool,
) -> Result<AimSequence<Series1<T>>, AimError> {
    let (l0, s0) = problem.seed(trial, order)?;
    iterate_jets(l0, s0, n_max, rescale)
}

/// δₙ of `problem` at `trial` (rescaled; only its sign and zero set are meaningful).
pub fn delta_at<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    trial: &T,
    n: usize,
    rescale: bool,
) -> Result<T, AimError> {
    if n == 0 {
        return Err(AimError::DepthOutOfRange { n, max: 0 });
    }
    let (l0, s0) = problem.seed(trial, n + 2)?;
    let profile = delta_profile(&l0, &s0, n, rescale)?;
    Ok(profile[n - 1].value().clone())
}

fn sign_of<T: Scalar>(x: &T) -> i8 {
    if x.is_zero() {
        0
    } else if *x > x.zero_like() {
        1
    } else {
        -1
    }
}

/// Where a root of δ sits on the scan grid.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Bracket {
    Exact(usize),
    Between(usize),
}

fn brackets(signs: &[i8], grid: &[f64]) -> Result<Vec<Bracket>, AimError> {
    if signs.iter().all(|&s| s == 0) {
        // δ ≡ 0: the problem is degenerate, not a dense set of roots.
        return Ok(Vec::new());
    }
    let last = signs.len() - 1;
    for &edge in &[0, last] {
        if signs[edge] == 0 {
            return Err(AimError::RootAtBracketEdge { edge: grid[edge] });
        }
    }
    let mut out = Vec::new();
    for i in 0..last {
        if signs[i] == 0 {
            out.push(Bracket::Exact(i));
        } else if signs[i + 1] != 0 && signs[i] != signs[i + 1] {
            out.push(Bracket::Between(i));
        }
    }
    Ok(out)
}

/// Bisection tolerance for refined roots, relative to `max(|root|, 1)`.
pub const ROOT_REL_TOL: f64 = 1e-12;

fn bisect<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    depth: usize,
    lo: f64,
    hi: f64,
    sign_lo: i8,
    rescale: bool,
) -> Result<T, AimError> {
    let mut lo = problem.lift(lo);
    let mut hi = problem.lift(hi);
    let two = lo.lift(2.0);
    let tol = lo.lift(ROOT_REL_TOL);
    let one = lo.one_like();
    loop {
        let mid = (lo.clone() + &hi) / &two;
        let scale = if mid.abs() > one { mid.abs() } else { one.clone() };
        let width = hi.clone() - &lo;
        if width <= tol.clone() * &scale || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let s = sign_of(&delta_at(problem, &mid, depth, rescale)?);
        if s == 0 {
            return Ok(mid);
        }
        if s == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn refine<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    depth: usize,
    grid: &[f64],
    signs: &[i8],
    bracket: Bracket,
    rescale: bool,
) -> Result<T, AimError> {
    match bracket {
        Bracket::Exact(i) => Ok(problem.lift(grid[i])),
        Bracket::Between(i) => bisect(problem, depth, grid[i], grid[i + 1], signs[i], rescale),
    }
}

/// Every sign-change root of `trial ↦ δₙ(trial)` in the problem's scan
/// bracket, refined by bisection and sorted ascending. An empty list means no
/// sign change was found.
pub fn find_roots<T: Scalar, P: AimProblem<T> + ?Sized>(problem: &P, n: usize) -> Result<Vec<T>, AimError> {
    find_roots_with(problem, n, true)
}

/// [`find_roots`] with the rescaling switch exposed.
pub fn find_roots_with<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    n: usize,
    rescale: bool,
) -> Result<Vec<T>, AimError> {
    if n == 0 {
        return Err(AimError::DepthOutOfRange { n, max: 0 });
    }
    let grid = problem.scan().points();
    let mut signs = Vec::with_capacity(grid.len());
    for &g in &grid {
        signs.push(sign_of(&delta_at(problem, &problem.lift(g), n, rescale)?));
    }
    brackets(&signs, &grid)?
        .into_iter()
        .map(|b| refine(problem, n, &grid, &signs, b, rescale))
        .collect()
}

/// Sign table `signs[k - 1][i]` of δₖ at grid point `i`, for `k = 1..=depth`.
fn sign_table<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    grid: &[f64],
    depth: usize,
) -> Result<Vec<Vec<i8>>, AimError> {
    let mut table = vec![Vec::with_capacity(grid.len()); depth];
    for &g in grid {
        let (l0, s0) = problem.seed(&problem.lift(g), depth + 2)?;
        let profile = delta_profile(&l0, &s0, depth, true)?;
        for (k, d) in profile.iter().enumerate() {
            table[k].push(sign_of(d.value()));
        }
    }
    Ok(table)
}

/// One converged (or best-effort) eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    pub level: usize,
    pub eigenvalue: T,
    pub iterations_used: usize,
    pub converged: bool,
    /// |δ| at the reported eigenvalue and depth, after rescaling.
    pub residual: T,
    /// |E_m − E_{m−1}| at the stopping depth.
    pub successive_delta: T,
}

/// Stopping rule for [`converge_level`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeOptions {
    /// Absolute tolerance on successive root estimates.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ConvergeOptions {
    fn default() -> Self {
        ConvergeOptions { tol: 1e-6, max_iter: 60 }
    }
}

/// Tracks the `(level + 1)`-th ascending root of δₘ for `m = 1, 2, …` and
/// stops at the first `m` where it moves by less than `tol`.
pub fn converge_level<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    level: usize,
    opts: ConvergeOptions,
) -> Result<EigenResult<T>, AimError> {
    Ok(converge_levels(problem, &[level], opts)?.remove(0))
}

struct Track<T> {
    last: Option<T>,
    result: Option<EigenResult<T>>,
}

/// [`converge_level`] for several levels, sharing the trial-eigenvalue scans.
/// Results come back in the order of `levels`.
pub fn converge_levels<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    levels: &[usize],
    opts: ConvergeOptions,
) -> Result<Vec<EigenResult<T>>, AimError> {
    if !(opts.tol > 0.0) {
        return Err(AimError::InvalidProblem(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if levels.is_empty() {
        return Ok(Vec::new());
    }
    let top = *levels.iter().max().unwrap_or(&0);
    let grid = problem.scan().points();
    let tol = problem.lift(opts.tol);
    let mut tracks: Vec<Track<T>> = (0..=top).map(|_| Track { last: None, result: None }).collect();
    let wanted = |tracks: &[Track<T>]| levels.iter().any(|&l| tracks[l].result.as_ref().is_none_or(|r| !r.converged));

    let mut done_depth = 0;
    let mut cap = 16.min(opts.max_iter);
    while done_depth < opts.max_iter && wanted(&tracks) {
        let table = sign_table(problem, &grid, cap)?;
        for m in (done_depth + 1)..=cap {
            let signs = &table[m - 1];
            let found = brackets(signs, &grid)?;
            let mut roots = Vec::with_capacity(top + 1);
            for b in found.into_iter().take(top + 1) {
                roots.push(refine(problem, m, &grid, signs, b, true)?);
            }
            for (level, track) in tracks.iter_mut().enumerate() {
                if track.result.as_ref().is_some_and(|r| r.converged) {
                    continue;
                }
                let Some(cand) = roots.get(level) else {
                    track.last = None;
                    continue;
                };
                let successive = match &track.last {
                    Some(prev) => (cand.clone() - prev).abs(),
                    None => cand.lift(f64::INFINITY),
                };
                let converged = successive < tol;
                let residual = delta_at(problem, cand, m, true)?.abs();
                track.result = Some(EigenResult {
                    level,
                    eigenvalue: cand.clone(),
                    iterations_used: m,
                    converged,
                    residual,
                    successive_delta: successive,
                });
                track.last = Some(cand.clone());
            }
            done_depth = m;
            if !wanted(&tracks) {
                break;
            }
        }
        cap = (cap * 2).min(opts.max_iter);
    }

    let max_roots = tracks.iter().filter(|t| t.result.is_some()).count();
    levels
        .iter()
        .map(|&level| {
            tracks[level].result.clone().ok_or(AimError::LevelNotFound { level, max_roots })
        })
        .collect()
}

/// Evaluation settings for [`eigenfunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenfunctionOptions {
    /// Points with `|y − y₀|` beyond this are reached by continuation.
    pub trust_radius: f64,
    /// Order of the series of `f` about `y₀` and of each continuation step.
    pub series_order: usize,
    /// Order of the endpoint expansions.
    pub endpoint_order: usize,
}

impl Default for EigenfunctionOptions {
    fn default() -> Self {
        EigenfunctionOptions { trust_radius: 0.5, series_order: 48, endpoint_order: 400 }
    }
}

/// Taylor coefficients of the solution of `f'' = λ₀ f' + s₀ f` with the given
/// value and slope at the common center.
fn ode_series<T: Scalar>(
    lambda0: &Series1<T>,
    s0: &Series1<T>,
    value: &T,
    slope: &T,
    order: usize,
) -> Vec<T> {
    let mut f: Vec<T> = Vec::with_capacity(order + 1);
    f.push(value.clone());
    f.push(slope.clone());
    let mut df: Vec<T> = vec![slope.clone()];
    for j in 0..=(order - 2) {
        // coefficient j of λ₀ f' + s₀ f
        let mut acc = value.zero_like();
        for i in 0..=j {
            acc.add_mul(&lambda0.coeffs()[i], &df[j - i]);
            acc.add_mul(&s0.coeffs()[i], &f[j - i]);
        }
        let next = acc / &value.lift(((j + 2) * (j + 1)) as f64);
        df.push(next.clone() * &value.lift((j + 2) as f64));
        f.push(next);
    }
    f
}

fn horner<T: Scalar>(coeffs: &[T], t: &T) -> (T, T) {
    let mut v = coeffs[coeffs.len() - 1].clone();
    let mut d = t.zero_like();
    for c in coeffs[..coeffs.len() - 1].iter().rev() {
        d *= t;
        d += &v;
        v *= t;
        v += c;
    }
    (v, d)
}

const MATCH_POINTS: usize = 16;

/// Relative size of `f(y₀)`, against the matching interval, below which the
/// end-series solution is left at its least-squares scale instead of being
/// divided by `f(y₀)`.
const NORMALIZE_FLOOR: f64 = 1e-3;

/// `f(y) = exp(−∫ α)` on a grid of `x ∈ (0, π)` (with `y = cos x`),
/// normalized so that `f(y₀) = 1`.
///
/// On each side of `y₀` the solution that is analytic at the nearest singular
/// point is used when the problem supplies it. When both sides have one, the
/// lower is fitted to the upper by least squares on a short interval about
/// `y₀` and the result is divided by its value at `y₀`. Without them, the
/// series of `exp(−∫ α)` is used inside the trust radius and the ODE is
/// stepped outward with local Taylor expansions beyond.
pub fn eigenfunction<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    eigenvalue: &T,
    seq: &AimSequence<Series1<T>>,
    grid_x: &[f64],
    opts: EigenfunctionOptions,
) -> Result<Vec<T>, AimError> {
    let n = seq.n();
    let alpha = seq.alpha(n)?;
    let log_f = alpha.integral().neg().truncate(alpha.order());
    let f_series = log_f.exp();
    let y0 = problem.center();
    let y0f = y0.to_f64();
    let singular = problem.singularities();
    let radius_to_singular = |c: f64| singular.iter().map(|s| (s - c).abs()).fold(f64::INFINITY, f64::min);
    let trust = opts.trust_radius.min(0.5 * radius_to_singular(y0f));
    let half = 0.5 * trust;
    let matching: Vec<f64> = (0..=MATCH_POINTS).map(|j| y0f - half + 2.0 * half * j as f64 / MATCH_POINTS as f64).collect();

    let mut above: Vec<(f64, usize)> = Vec::new();
    let mut below: Vec<(f64, usize)> = Vec::new();
    for (i, &x) in grid_x.iter().enumerate() {
        if !(x > 0.0 && x < std::f64::consts::PI) {
            return Err(AimError::InvalidProblem(format!("grid point {x} outside (0, π)")));
        }
        let y = x.cos();
        if y >= y0f {
            above.push((y, i));
        } else {
            below.push((y, i));
        }
    }

    let end_series = |dir: f64| -> Option<(f64, Vec<T>)> {
        let edge = singular.iter().copied().filter(|s| dir * (s - y0f) > 0.0).min_by(|a, b| (dir * a).total_cmp(&(dir * b)))?;
        problem.regular_solution_at(eigenvalue, edge, opts.endpoint_order).map(|c| (edge, c))
    };
    let eval = |(point, coeffs): &(f64, Vec<T>), y: f64| horner(coeffs, &(y0.lift(y) - &y0.lift(*point))).0;
    let central = |y: f64| f_series.eval(&y0.lift(y));

    let mut out: Vec<Option<T>> = vec![None; grid_x.len()];
    match (end_series(1.0), end_series(-1.0)) {
        (Some(upper), Some(lower)) => {
            let ratio = least_squares_scale(&matching, |y| eval(&lower, y), |y| eval(&upper, y))?;
            let at_y0 = eval(&upper, y0f);
            let spread = matching.iter().map(|&y| eval(&upper, y).abs()).fold(y0.zero_like(), |m, v| if v > m { v } else { m });
            let scale = if at_y0.abs() > spread * &y0.lift(NORMALIZE_FLOOR) {
                y0.one_like() / &at_y0
            } else {
                least_squares_scale(&matching, |y| eval(&upper, y), central)?
            };
            let lower_scale = ratio * &scale;
            for (y, i) in above {
                out[i] = Some(eval(&upper, y) * &scale);
            }
            for (y, i) in below {
                out[i] = Some(eval(&lower, y) * &lower_scale);
            }
        }
        (upper, lower) => {
            for (targets, dir, end) in [(above, 1.0, upper), (below, -1.0, lower)] {
                if let Some(end) = end {
                    let scale = least_squares_scale(&matching, |y| eval(&end, y), central)?;
                    for (y, i) in targets {
                        out[i] = Some(eval(&end, y) * &scale);
                    }
                    continue;
                }
                let mut outside = Vec::new();
                for (y, i) in targets {
                    if (y - y0f).abs() <= trust {
                        out[i] = Some(central(y));
                    } else {
                        outside.push((y, i));
                    }
                }
                if !outside.is_empty() {
                    continue_ode(problem, eigenvalue, &f_series, trust, dir, outside, &mut out, opts)?;
                }
            }
        }
    }
    Ok(out.into_iter().map(|v| v.expect("every grid point is assigned")).collect())
}

/// `c` minimizing `Σ (c·f(y) − g(y))²` over `points`.
fn least_squares_scale<T: Scalar>(points: &[f64], f: impl Fn(f64) -> T, g: impl Fn(f64) -> T) -> Result<T, AimError> {
    let (mut num, mut den): (Option<T>, Option<T>) = (None, None);
    for &y in points {
        let fy = f(y);
        let gy = g(y);
        let nf = fy.clone() * &gy;
        let df = fy.clone() * &fy;
        num = Some(match num { Some(v) => v + &nf, None => nf });
        den = Some(match den { Some(v) => v + &df, None => df });
    }
    match (num, den) {
        (Some(num), Some(den)) if !den.is_zero() => Ok(num / &den),
        _ => Err(AimError::InvalidProblem("endpoint solution vanishes on the matching interval".into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn continue_ode<T: Scalar, P: AimProblem<T> + ?Sized>(
    problem: &P,
    eigenvalue: &T,
    f_series: &Series1<T>,
    trust: f64,
    dir: f64,
    mut targets: Vec<(f64, usize)>,
    out: &mut [Option<T>],
    opts: EigenfunctionOptions,
) -> Result<(), AimError> {
    let y0 = problem.center();
    let y0f = y0.to_f64();
    let singular = problem.singularities();
    let radius_to_singular = |c: f64| singular.iter().map(|s| (s - c).abs()).fold(f64::INFINITY, f64::min);
    targets.sort_by(|a, b| (dir * a.0).total_cmp(&(dir * b.0)));
    // start at the trust boundary in the direction of travel
    let start = y0f + dir * trust;
    let t0 = y0.lift(start) - &y0;
    let (mut value, mut slope) = horner(f_series.coeffs(), &t0);
    let mut c = start;
    let mut idx = 0;
    while idx < targets.len() {
        let h_max = 0.5 * radius_to_singular(c);
        let (l0, s0) = problem.seed_at(eigenvalue, &y0.lift(c), opts.series_order)?;
        let coeffs = ode_series(&l0, &s0, &value, &slope, opts.series_order);
        while idx < targets.len() && dir * (targets[idx].0 - c) <= h_max {
            let t = y0.lift(targets[idx].0 - c);
            out[targets[idx].1] = Some(horner(&coeffs, &t).0);
            idx += 1;
        }
        if idx < targets.len() {
            let next = c + dir * h_max;
            let (v, d) = horner(&coeffs, &y0.lift(next - c));
            value = v;
            slope = d;
            c = next;
        }
    }
    Ok(())
}
