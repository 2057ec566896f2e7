//! The five reference tables and their reproduction.
//!
//! Tables 1–4 pass when every gating cell lies within `10⁻³` of the
//! reference value. Table 4 also requires `|E_direct − Eₙᵖ|` to be
//! non-increasing from `n = 2`, and Table 5 requires the two energies to
//! disagree by more than 1 at `n = 0`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::report::{self, fmt_sig, Format, Record, RunError, RunSettings};
use crate::well::{self, WellParams};

/// Absolute tolerance on reproduced cells.
pub const TOLERANCE: f64 = 1e-3;

/// Informational band on iteration counts.
pub const ITERATION_BAND: usize = 5;

/// Minimum `|E_direct − Eₙᵖ|` at `n = 0` for Table 5.
pub const BREAKDOWN_GAP: f64 = 1.0;

/// `(n, k, A, ω, E)`.
pub const TABLE1: [(usize, usize, f64, f64, f64); 21] = [
    (0, 0, -11.0, 0.0, 16.0000),
    (1, 0, -13.0, -0.424429, 15.5756),
    (1, 1, -13.0, 9.42443, 25.4244),
    (2, 0, -15.0, -0.919071, 15.0809),
    (2, 1, -15.0, 9.27711, 25.2771),
    (2, 2, -15.0, 20.642, 36.642),
    (3, 0, -17.0, -1.47815, 14.5218),
    (3, 1, -17.0, 9.09552, 25.0955),
    (3, 2, -17.0, 20.6205, 36.6205),
    (3, 3, -17.0, 33.7621, 49.7621),
    (4, 0, -19.0, -2.09614, 13.9039),
    (4, 1, -19.0, 8.87768, 24.8777),
    (4, 2, -19.0, 20.5892, 36.5892),
    (4, 3, -19.0, 33.7953, 49.7953),
    (4, 4, -19.0, 48.834, 64.834),
    (5, 0, -21.0, -2.76786, 13.2321),
    (5, 1, -21.0, 8.62229, 24.6223),
    (5, 2, -21.0, 20.5459, 36.5459),
    (5, 3, -21.0, 33.8293, 49.8293),
    (5, 4, -21.0, 48.8905, 64.8905),
    (5, 5, -21.0, 65.8799, 81.8799),
];

/// `B` and `γ` of Table 1.
pub const TABLE1_B: f64 = 1.0;
pub const TABLE1_GAMMA: f64 = 3.0;

/// `(A, B, γ)`.
pub type ParamSet = (f64, f64, f64);

/// `(ω, E_direct, iterations)`.
pub type DirectRow = (f64, f64, usize);

/// `(A, B, γ)` and rows for `n = 0…5`.
pub const TABLE2: [(ParamSet, [DirectRow; 6]); 3] = [
    (
        (0.167, 0.0019, 0.0019),
        [
            (-0.00231, 1.00149, 3),
            (3.00473, 4.00853, 4),
            (8.008, 9.0118, 5),
            (15.0116, 16.0154, 6),
            (24.0153, 25.0191, 7),
            (35.0191, 36.0229, 8),
        ],
    ),
    (
        (2.0, 0.5, 1.0),
        [
            (0.07399, 4.07399, 10),
            (5.17104, 9.17104, 12),
            (12.1609, 16.1609, 11),
            (21.1506, 25.1506, 13),
            (32.1438, 36.1438, 14),
            (45.1392, 49.1392, 15),
        ],
    ),
    (
        (4.0, 1.0, 1.97),
        [
            (0.57328, 9.39418, 13),
            (7.618, 16.4389, 13),
            (16.5264, 25.3473, 14),
            (27.4331, 36.254, 16),
            (40.348, 49.1689, 18),
            (55.2698, 64.0907, 19),
        ],
    ),
];

/// Rows `(ω, E_direct, iterations, Eₙᵖ)`.
pub const TABLE3_PARAMS: (f64, f64, f64) = (2.0, 2.0, 4.0);
pub const TABLE3: [(f64, f64, usize, f64); 6] = [
    (3.6259, 28.6259, 13, 28.6364),
    (14.1219, 39.1219, 14, 39.1329),
    (26.8245, 51.8245, 17, 51.8308),
    (41.6323, 66.6323, 18, 66.6353),
    (58.5005, 83.5005, 19, 83.5015),
    (77.406, 102.406, 19, 102.406),
];

pub const TABLE4_PARAMS: (f64, f64, f64) = (2.0, 1.0, 0.0019);
pub const TABLE4: [(f64, f64, usize, f64); 11] = [
    (0.38637, 1.39017, 12, 1.42145),
    (3.65921, 4.66301, 13, 4.64073),
    (8.56603, 9.56983, 16, 9.56855),
    (15.5445, 16.5483, 15, 16.547),
    (24.5364, 25.5402, 16, 25.5392),
    (35.5338, 36.5376, 18, 36.5368),
    (48.5336, 49.5374, 18, 49.5369),
    (63.5349, 64.5387, 19, 64.5383),
    (80.537, 81.5408, 20, 81.5404),
    (99.5392, 100.543, 20, 100.543),
    (120.542, 121.546, 21, 121.546),
];

pub const TABLE5_PARAMS: (f64, f64, f64) = (5.0, 5.0, 0.5);
pub const TABLE5: [(f64, f64, usize, f64); 6] = [
    (11.8935, 14.1435, 31, 21.0000),
    (19.3048, 21.5548, 34, 20.8333),
    (25.0743, 27.3243, 36, 25.7917),
    (32.0111, 34.2611, 40, 33.375),
    (41.5015, 43.7515, 37, 43.1667),
    (53.2222, 55.4722, 39, 55.0476),
];

/// A computed value beside its reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub computed: f64,
    pub computed_full: String,
    pub reference: f64,
    pub deviation: f64,
    /// Whether the cell counts toward pass/fail.
    pub gating: bool,
}

impl Cell {
    fn new(computed: f64, computed_full: String, reference: f64, gating: bool) -> Self {
        Cell { computed, computed_full, reference, deviation: (computed - reference).abs(), gating }
    }

    fn plain(computed: f64, reference: f64, gating: bool) -> Self {
        Self::new(computed, format!("{computed:e}"), reference, gating)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub params: WellParams,
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sublevel: Option<usize>,
    /// `A` as computed, with the reference column alongside (informational).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Cell>,
    pub omega: Cell,
    pub energy: Cell,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_p: Option<Cell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_iterations: Option<usize>,
    pub converged: bool,
}

impl TableRow {
    fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.a.iter().chain([&self.omega, &self.energy]).chain(self.energy_p.iter())
    }

    fn iterations_in_band(&self) -> Option<bool> {
        Some(self.iterations?.abs_diff(self.reference_iterations?) <= ITERATION_BAND)
    }
}

/// A named pass/fail assertion beyond the cell tolerances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub table: u8,
    pub tolerance: f64,
    pub rows: Vec<TableRow>,
    pub max_deviation: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl TableReport {
    fn finish(table: u8, rows: Vec<TableRow>, checks: Vec<Check>) -> Self {
        let max_deviation = rows
            .iter()
            .flat_map(|r| r.cells().filter(|c| c.gating).map(|c| c.deviation))
            .fold(0.0, f64::max);
        let passed = max_deviation < TOLERANCE && rows.iter().all(|r| r.converged) && checks.iter().all(|c| c.passed);
        TableReport { table, tolerance: TOLERANCE, rows, max_deviation, checks, passed }
    }

    /// Rows whose iteration count lies outside the informational band.
    pub fn iteration_outliers(&self) -> Vec<&TableRow> {
        self.rows.iter().filter(|r| r.iterations_in_band() == Some(false)).collect()
    }
}

fn params(t: (f64, f64, f64)) -> Result<WellParams, RunError> {
    Ok(WellParams::new(t.0, t.1, t.2)?)
}

fn cell(computed: f64, full: &str, reference: f64, gating: bool) -> Cell {
    Cell::new(computed, full.to_string(), reference, gating)
}

/// Recomputes table `id` (1–5).
pub fn reproduce(id: u8, s: &RunSettings) -> Result<TableReport, RunError> {
    match id {
        1 => table1(s),
        2 => table2(s),
        3 => perturbation_table(3, TABLE3_PARAMS, &TABLE3, s),
        4 => perturbation_table(4, TABLE4_PARAMS, &TABLE4, s),
        5 => perturbation_table(5, TABLE5_PARAMS, &TABLE5, s),
        _ => Err(RunError::Invalid(format!("no table {id}; expected 1–5"))),
    }
}

fn table1(s: &RunSettings) -> Result<TableReport, RunError> {
    let mut rows = Vec::new();
    for n in 0..=5 {
        let recs = report::quasi(n, TABLE1_GAMMA, TABLE1_B, s)?;
        for rec in recs {
            let k = rec.sublevel.unwrap_or(0);
            let &(_, _, a_ref, w_ref, e_ref) = TABLE1
                .iter()
                .find(|r| r.0 == n && r.1 == k)
                .ok_or_else(|| RunError::Invalid(format!("unexpected sub-level ({n}, {k})")))?;
            rows.push(TableRow {
                params: rec.params,
                level: n,
                sublevel: Some(k),
                a: Some(Cell::plain(rec.params.a, a_ref, false)),
                omega: cell(rec.omega, &rec.omega_full, w_ref, true),
                energy: cell(rec.energy, &rec.energy_full, e_ref, true),
                energy_p: None,
                iterations: None,
                reference_iterations: None,
                converged: true,
            });
        }
    }
    let count = Check {
        name: "row count".into(),
        passed: rows.len() == TABLE1.len(),
        detail: format!("{} of {} sub-levels", rows.len(), TABLE1.len()),
    };
    Ok(TableReport::finish(1, rows, vec![count]))
}

fn direct_row(rec: &Record, w_ref: f64, e_ref: f64, it_ref: usize) -> TableRow {
    TableRow {
        params: rec.params,
        level: rec.level,
        sublevel: None,
        a: None,
        omega: cell(rec.omega, &rec.omega_full, w_ref, true),
        energy: cell(rec.energy, &rec.energy_full, e_ref, true),
        energy_p: None,
        iterations: rec.iterations,
        reference_iterations: Some(it_ref),
        converged: rec.converged,
    }
}

fn table2(s: &RunSettings) -> Result<TableReport, RunError> {
    let levels: Vec<usize> = (0..6).collect();
    let mut rows = Vec::new();
    for (p, reference) in TABLE2 {
        let recs = report::solve(&params(p)?, &levels, s)?;
        for (rec, &(w, e, it)) in recs.iter().zip(reference.iter()) {
            rows.push(direct_row(rec, w, e, it));
        }
    }
    Ok(TableReport::finish(2, rows, Vec::new()))
}

fn perturbation_table(id: u8, p: (f64, f64, f64), reference: &[(f64, f64, usize, f64)], s: &RunSettings) -> Result<TableReport, RunError> {
    let p = params(p)?;
    let levels: Vec<usize> = (0..reference.len()).collect();
    let recs = report::solve(&p, &levels, s)?;
    let mut rows = Vec::new();
    for (rec, &(w, e, it, ep)) in recs.iter().zip(reference) {
        let mut row = direct_row(rec, w, e, it);
        let energy_p = crate::perturbation::perturbed_energy(rec.level, &p)?;
        row.energy_p = Some(Cell::plain(energy_p, ep, true));
        rows.push(row);
    }
    let gap = |r: &TableRow| (r.energy.computed - r.energy_p.as_ref().map_or(f64::NAN, |c| c.computed)).abs();
    let mut checks = Vec::new();
    if id == 4 {
        let gaps: Vec<f64> = rows.iter().skip(2).map(gap).collect();
        let first_rise = gaps.windows(2).position(|w| w[1] > w[0]);
        checks.push(Check {
            name: "|E_direct − E_n^p| non-increasing for n ≥ 2".into(),
            passed: first_rise.is_none(),
            detail: match first_rise {
                None => format!("gaps {}", join_sig(&gaps)),
                Some(i) => format!("rises from n={} to n={}: gaps {}", i + 2, i + 3, join_sig(&gaps)),
            },
        });
    }
    if id == 5 {
        let g = gap(&rows[0]);
        checks.push(Check {
            name: format!("|E_direct − E_n^p| > {BREAKDOWN_GAP} at n = 0"),
            passed: g > BREAKDOWN_GAP,
            detail: format!("gap {}", fmt_sig(g, 6)),
        });
    }
    Ok(TableReport::finish(id, rows, checks))
}

fn join_sig(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_sig(*x, 4)).collect::<Vec<_>>().join(", ")
}

/// The report as TSV (reference column names, then deviations and a summary
/// in `#` lines) or JSON.
pub fn emit(report: &TableReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Tsv => tsv(report),
    }
}

fn tsv(r: &TableReport) -> String {
    let f = |x: f64| fmt_sig(x, 6);
    let mut out = String::new();
    let header = match r.table {
        1 => "n\tk\tA\tω_nk\tE_nk\tmax |Δ|",
        2 => "A\tB\tγ\tn\tω\tE_direct\titer\tref iter\tmax |Δ|",
        _ => "n\tω_n\tE_direct\tE_n^p\titer\tref iter\tmax |Δ|",
    };
    out.push_str(header);
    out.push('\n');
    for row in &r.rows {
        let dev = row.cells().filter(|c| c.gating).map(|c| c.deviation).fold(0.0, f64::max);
        let it = |x: Option<usize>| x.map_or("-".to_string(), |i| i.to_string());
        let line = match r.table {
            1 => format!(
                "{}\t{}\t{}\t{}\t{}\t{:.1e}",
                row.level,
                row.sublevel.unwrap_or(0),
                row.a.as_ref().map_or("-".into(), |c| f(c.computed)),
                f(row.omega.computed),
                f(row.energy.computed),
                dev
            ),
            2 => format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.1e}",
                row.params.a,
                row.params.b,
                row.params.gamma,
                row.level,
                f(row.omega.computed),
                f(row.energy.computed),
                it(row.iterations),
                it(row.reference_iterations),
                dev
            ),
            _ => format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.1e}",
                row.level,
                f(row.omega.computed),
                f(row.energy.computed),
                row.energy_p.as_ref().map_or("-".into(), |c| f(c.computed)),
                it(row.iterations),
                it(row.reference_iterations),
                dev
            ),
        };
        let _ = writeln!(out, "{line}");
    }
    if r.table == 1 {
        let _ = writeln!(out, "# A is the value with ξ = −2nB; the reference A column is lower by 2B = {}", 2.0 * TABLE1_B);
    }
    let _ = writeln!(out, "# max |Δ| {:.2e} (tolerance {:.0e})", r.max_deviation, r.tolerance);
    for c in &r.checks {
        let _ = writeln!(out, "# {}: {} ({})", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
    }
    let outliers = r.iteration_outliers().len();
    if r.rows.iter().any(|row| row.reference_iterations.is_some()) {
        let _ = writeln!(out, "# iteration counts outside ±{ITERATION_BAND} of reference: {outliers} (informational)");
    }
    let _ = writeln!(out, "# {}", if r.passed { "PASS" } else { "FAIL" });
    out
}

/// `(γ+1)²` for a parameter triple.
pub fn energy_offset(p: (f64, f64, f64)) -> f64 {
    well::energy_from_omega(&0.0, p.2)
}
