//! Running solves at a chosen precision and emitting the results as TSV or JSON.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aim::{self, AimError, ConvergeOptions};
use crate::oracle::{self, OracleError};
use crate::perturbation::{self, PerturbError, PerturbModel};
use crate::series::{Mp, Precision, Scalar};
use crate::well::{self, WellError, WellParams, WellProblem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Well(#[from] WellError),
    #[error(transparent)]
    Aim(#[from] AimError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Knobs shared by every solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub y0: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// Requested significant digits; raised automatically for deep iteration.
    pub digits: u32,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings { y0: well::DEFAULT_Y0, max_iter: 60, tol: 1e-6, digits: crate::series::DOUBLE_DIGITS }
    }
}

impl RunSettings {
    pub fn validate(&self) -> Result<(), RunError> {
        if !(self.y0.abs() < 1.0) {
            return Err(RunError::Invalid(format!("y0 must satisfy |y0| < 1, got {}", self.y0)));
        }
        if !(self.tol > 0.0) {
            return Err(RunError::Invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(RunError::Invalid("max-iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Working precision after the automatic raise.
    pub fn precision(&self) -> Precision {
        Precision::for_iterations(self.digits, self.max_iter)
    }

    pub fn converge_options(&self) -> ConvergeOptions {
        ConvergeOptions { tol: self.tol, max_iter: self.max_iter }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Aim,
    Quasi,
    Perturb,
    Oracle,
}

/// One reported level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub params: WellParams,
    pub level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sublevel: Option<usize>,
    pub omega: f64,
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub converged: bool,
    pub source: Source,
    pub omega_full: String,
    pub energy_full: String,
    /// ω⁽⁰⁾, ω⁽¹⁾, ω⁽²⁾ from the order-by-order solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrections: Option<[f64; 3]>,
    /// Coarse and fine grid values behind an extrapolated oracle energy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_values: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
}

impl Record {
    fn new<T: Scalar>(params: WellParams, level: usize, omega: &T, energy: &T, source: Source) -> Self {
        Record {
            params,
            level,
            sublevel: None,
            omega: omega.to_f64(),
            energy: energy.to_f64(),
            iterations: None,
            converged: true,
            source,
            omega_full: omega.to_full_string(),
            energy_full: energy.to_full_string(),
            corrections: None,
            grid_values: None,
            nodes: None,
        }
    }
}

fn check_levels(levels: &[usize]) -> Result<usize, RunError> {
    levels.iter().copied().max().ok_or_else(|| RunError::Invalid("no levels requested".into()))
}

/// Converged AIM energies for `levels`.
pub fn solve(p: &WellParams, levels: &[usize], s: &RunSettings) -> Result<Vec<Record>, RunError> {
    s.validate()?;
    if s.precision().is_double() {
        solve_with::<f64>(p, levels, s)
    } else {
        solve_with::<Mp>(p, levels, s)
    }
}

fn solve_with<T: Scalar>(p: &WellParams, levels: &[usize], s: &RunSettings) -> Result<Vec<Record>, RunError> {
    let top = check_levels(levels)?;
    let problem = WellProblem::<T>::new(*p, s.y0, s.precision(), top)?;
    let results = aim::converge_levels(&problem, levels, s.converge_options())?;
    Ok(results
        .into_iter()
        .map(|r| {
            let energy = well::energy_from_omega(&r.eigenvalue, p.gamma);
            let mut rec = Record::new(*p, r.level, &r.eigenvalue, &energy, Source::Aim);
            rec.iterations = Some(r.iterations_used);
            rec.converged = r.converged;
            rec
        })
        .collect())
}

/// The quasi-exact spectrum at degree `n`; `A` is computed from `B` and `γ`.
pub fn quasi(n: usize, gamma: f64, b: f64, s: &RunSettings) -> Result<Vec<Record>, RunError> {
    s.validate()?;
    if s.precision().is_double() {
        quasi_with::<f64>(n, gamma, b, s)
    } else {
        quasi_with::<Mp>(n, gamma, b, s)
    }
}

fn quasi_with<T: Scalar>(n: usize, gamma: f64, b: f64, s: &RunSettings) -> Result<Vec<Record>, RunError> {
    let levels = well::quasi_spectrum::<T>(n, gamma, b, s.y0, s.precision())?;
    let params = WellParams::new(well::quasi_a(n, gamma, b), b, gamma)?;
    Ok(levels
        .into_iter()
        .map(|l| {
            let mut rec = Record::new(params, l.n, &l.omega, &l.energy, Source::Quasi);
            rec.sublevel = Some(l.k);
            rec
        })
        .collect())
}

/// Perturbed energies `Eₙᵖ` in closed form; when `B ≠ 0` the order-by-order
/// corrections are solved numerically and attached.
pub fn perturb(p: &WellParams, levels: &[usize], s: &RunSettings) -> Result<Vec<Record>, RunError> {
    s.validate()?;
    check_levels(levels)?;
    // the corrections need only shallow depths; double precision is not enough
    // for 1e-8 agreement at higher levels, so use at least 40 digits
    let precision = Precision::digits(s.precision().get().max(40));
    let model = if p.b != 0.0 { Some(PerturbModel::<Mp>::from_params(p, s.y0, precision)?) } else { None };
    levels
        .iter()
        .map(|&n| {
            let energy = perturbation::perturbed_energy(n, p)?;
            let omega = perturbation::omega_perturbed(n, p)?;
            let mut rec = Record::new(*p, n, &omega, &energy, Source::Perturb);
            if let Some(m) = &model {
                let c = perturbation::solve_corrections(m, n)?;
                rec.corrections = Some([c.omega0.to_f64(), c.omega1.to_f64(), c.omega2.to_f64()]);
                rec.iterations = Some(c.depth);
            }
            Ok(rec)
        })
        .collect()
}

/// Richardson-extrapolated finite-difference energies for levels `0..=top`.
pub fn oracle(p: &WellParams, levels: &[usize], intervals: usize) -> Result<Vec<Record>, RunError> {
    let top = check_levels(levels)?;
    let all = oracle::solve(p, top + 1, intervals)?;
    let offset = p.energy_offset();
    Ok(levels
        .iter()
        .map(|&n| {
            let l = &all[n];
            let mut rec = Record::new(*p, n, &(l.extrapolated - offset), &l.extrapolated, Source::Oracle);
            rec.grid_values = Some([l.coarse, l.fine]);
            rec.nodes = Some(l.nodes);
            rec
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Tsv,
    Json,
}

/// `x` with `digits` significant digits in the style of C's `%g`, keeping
/// trailing zeros.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return format!("{:.*}", digits.max(1) - 1, 0.0);
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').map_or(0, |i| i + 1)..].parse().unwrap_or(0);
    if exp < -5 || exp >= digits as i32 {
        sci
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// Records as TSV with a header matching the kind of run, or as a JSON array.
pub fn emit_records(records: &[Record], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(records).expect("records serialize");
            s.push('\n');
            s
        }
        Format::Tsv => records_tsv(records),
    }
}

fn records_tsv(records: &[Record]) -> String {
    let f = |x: f64| fmt_sig(x, 6);
    let source = records.first().map_or(Source::Aim, |r| r.source);
    let mut out = String::new();
    let header = match source {
        Source::Aim => "n\tω_n\tE_direct\titer\tconverged",
        Source::Quasi => "n\tk\tA\tω_nk\tE_nk",
        Source::Perturb => "n\tω_n\tE_n^p\tω_n^(0)\tω_n^(1)\tω_n^(2)",
        Source::Oracle => "n\tE_M\tE_2M\tE_extrapolated\tnodes",
    };
    out.push_str(header);
    out.push('\n');
    for r in records {
        let line = match source {
            Source::Aim => format!(
                "{}\t{}\t{}\t{}\t{}",
                r.level,
                f(r.omega),
                f(r.energy),
                r.iterations.map_or("-".into(), |i| i.to_string()),
                r.converged
            ),
            Source::Quasi => format!(
                "{}\t{}\t{}\t{}\t{}",
                r.level,
                r.sublevel.unwrap_or(0),
                f(r.params.a),
                f(r.omega),
                f(r.energy)
            ),
            Source::Perturb => {
                let c = r.corrections.map_or(["-".to_string(), "-".into(), "-".into()], |c| c.map(f));
                format!("{}\t{}\t{}\t{}\t{}\t{}", r.level, f(r.omega), f(r.energy), c[0], c[1], c[2])
            }
            Source::Oracle => {
                let [c, fi] = r.grid_values.unwrap_or([f64::NAN; 2]);
                format!("{}\t{}\t{}\t{}\t{}", r.level, f(c), f(fi), f(r.energy), r.nodes.unwrap_or(0))
            }
        };
        let _ = writeln!(out, "{line}");
    }
    out
}
