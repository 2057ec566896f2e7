//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the output of
//! `cargo test`. Exits non-zero on any unexpected failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use aimwell::aim::{converge_level, ConvergeOptions};
use aimwell::oracle::{self, DEFAULT_INTERVALS};
use aimwell::perturbation::{omega0_formula, omega2_formula, perturbed_energy, solve_corrections, PerturbModel};
use aimwell::report::RunSettings;
use aimwell::series::{Mp, Precision, Scalar, Series1, EXTENDED_DIGITS};
use aimwell::tables::{self, Cell, TableReport, TableRow, TABLE1_B, TABLE1_GAMMA, TOLERANCE};
use aimwell::well::{closed_form_n1, energy_from_omega, quasi_spectrum, WellParams, WellProblem};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

/// A criterion whose failure is expected: the stated property does not hold
/// for the model. It is still reported as FAIL.
const KNOWN_FAILURE: (u8, &str) = (
    4,
    "the Table 4 gap |E_direct − E_n^p| rises from n = 2 to n = 3; the reference values \
     (0.00128 → 0.0013) and the finite-difference oracle show the same rise",
);

struct Outcome {
    id: u8,
    passed: bool,
    detail: String,
}

fn report(id: u8, passed: bool, detail: String) -> Outcome {
    println!("criterion {id:>2}: {} {detail}", if passed { "PASS" } else { "FAIL" });
    Outcome { id, passed, detail }
}

fn table(id: u8) -> (TableReport, Duration) {
    let start = Instant::now();
    let rep = tables::reproduce(id, &RunSettings::default()).expect("table reproduces");
    (rep, start.elapsed())
}

/// Largest gating deviation among the named columns.
fn column_deviation(rep: &TableReport, pick: fn(&TableRow) -> Vec<&Cell>) -> f64 {
    rep.rows.iter().flat_map(|r| pick(r).into_iter().map(|c| c.deviation)).fold(0.0, f64::max)
}

fn energy(r: &TableRow) -> Vec<&Cell> {
    vec![&r.energy]
}

fn omega_and_ep(r: &TableRow) -> Vec<&Cell> {
    vec![&r.omega, r.energy_p.as_ref().expect("E_p column")]
}

fn energy_and_ep(r: &TableRow) -> Vec<&Cell> {
    vec![&r.energy, r.energy_p.as_ref().expect("E_p column")]
}

fn criterion1() -> Outcome {
    let (rep, t) = table(1);
    let dev = column_deviation(&rep, energy);
    let ok = rep.rows.len() == 21 && dev < TOLERANCE && t < Duration::from_secs(60);
    report(1, ok, format!("21 E_nk: {} rows, max |ΔE| {dev:.2e}, {:.1?}", rep.rows.len(), t))
}

fn criterion2() -> Outcome {
    let mut worst = 0.0f64;
    for gamma in [0.0, 1.0, 3.0, 4.7] {
        for b in [0.1, 1.0, 2.0] {
            let levels = quasi_spectrum::<Mp>(1, gamma, b, 0.5, Precision::digits(EXTENDED_DIGITS)).expect("n = 1 spectrum");
            let (lo, hi) = closed_form_n1(gamma, b);
            worst = worst.max((levels[0].energy.to_f64() - lo).abs()).max((levels[1].energy.to_f64() - hi).abs());
        }
    }
    let mut exact = true;
    for gamma in [0.0, 1.0, 3.0, 4.7] {
        let p = Precision::digits(EXTENDED_DIGITS);
        let level = &quasi_spectrum::<Mp>(0, gamma, 1.0, 0.5, p).expect("n = 0 spectrum")[0];
        let g1 = Mp::with_precision(gamma, p) + &Mp::with_precision(1.0, p);
        exact &= level.energy == g1.clone() * &g1;
    }
    report(2, worst < 1e-10 && exact, format!("n = 1 max |ΔE| {worst:.2e}; E_00 = (γ+1)² exactly: {exact}"))
}

fn criterion3(rep: &TableReport, t: Duration) -> Outcome {
    let dev = column_deviation(rep, energy);
    let extended = !RunSettings::default().precision().is_double()
        && Precision::for_iterations(16, 21).get() >= EXTENDED_DIGITS;
    let band = rep.iteration_outliers().len();
    let ok = rep.rows.len() == 18 && dev < TOLERANCE && extended && rep.rows.iter().all(|r| r.converged) && t < Duration::from_secs(120);
    report(
        3,
        ok,
        format!("18 E_direct: max |ΔE| {dev:.2e}, {:.1?}; iteration counts outside ±5: {band} (informational)", t),
    )
}

fn criterion4(t3: &TableReport, t4: &TableReport) -> Outcome {
    let dev = column_deviation(t3, omega_and_ep).max(column_deviation(t4, omega_and_ep));
    let values = t3.rows.len() == 6 && t4.rows.len() == 11 && dev < TOLERANCE;
    let trend = t4.checks.iter().find(|c| c.name.contains("non-increasing")).expect("trend check");
    report(
        4,
        values && trend.passed,
        format!(
            "ω_n and E_n^p (6 + 11 rows): max |Δ| {dev:.2e} ({}); trend: {} ({})",
            if values { "within 1e-3" } else { "outside 1e-3" },
            if trend.passed { "holds" } else { "does not hold" },
            trend.detail
        ),
    )
}

fn criterion5(rep: &TableReport, t: Duration) -> Outcome {
    let dev = column_deviation(rep, energy_and_ep);
    let gap = rep.checks.iter().find(|c| c.name.contains("> ")).expect("breakdown check");
    let ok = dev < TOLERANCE && gap.passed && t < Duration::from_secs(300);
    report(5, ok, format!("E_direct and E_n^p: max |Δ| {dev:.2e}; breakdown {} ({}), {:.1?}", gap.passed, gap.detail, t))
}

fn criterion6() -> Outcome {
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.5, 1.0, 3.0] {
        let p = WellParams::new(0.0, 0.0, gamma).expect("params");
        let problem = WellProblem::<Mp>::new(p, 0.5, Precision::digits(EXTENDED_DIGITS), 5).expect("problem");
        for n in 0..=5 {
            let exact = (n as f64 + gamma + 1.0).powi(2);
            let r = converge_level(&problem, n, ConvergeOptions::default()).expect("level converges");
            let direct = energy_from_omega(&r.eigenvalue, gamma).to_f64();
            let ep = perturbed_energy(n, &p).expect("closed form");
            worst = worst.max((direct - exact).abs()).max((ep - exact).abs());
        }
    }
    report(6, worst < 1e-8, format!("A = B = 0, γ ∈ {{0, 0.5, 1, 3}}, n ≤ 5: max |ΔE| {worst:.2e}"))
}

fn criterion7() -> Outcome {
    let (mut w0, mut w1, mut w2) = (0.0f64, 0.0f64, 0.0f64);
    for sigma in [3.0, 4.5, 5.5] {
        for a in [0.25, 0.5, 1.0] {
            let model = PerturbModel::<Mp>::new(sigma - 1.5, a, 1.0, 0.5, Precision::digits(40)).expect("model");
            for n in 0..=5 {
                let s = solve_corrections(&model, n).expect("corrections");
                let (expected2, _) = omega2_formula(n, sigma, a).expect("closed form");
                w0 = w0.max((s.omega0.to_f64() - omega0_formula(n, sigma)).abs());
                w1 = w1.max(s.omega1.to_f64().abs());
                w2 = w2.max((s.omega2.to_f64() - expected2).abs());
            }
        }
    }
    let ok = w0 < 1e-8 && w2 < 1e-8 && w1 < 1e-9;
    report(7, ok, format!("max |Δω⁽⁰⁾| {w0:.2e}, max |ω⁽¹⁾| {w1:.2e}, max |Δω⁽²⁾| {w2:.2e}"))
}

fn criterion8(reports: &[&TableReport]) -> Outcome {
    let mut worst = 0.0f64;
    let mut nodes_ok = true;
    let mut sets: Vec<(WellParams, Vec<f64>)> = Vec::new();
    for rep in reports {
        for row in rep.rows.iter().filter(|r| r.level <= 5) {
            match sets.iter_mut().find(|(p, _)| *p == row.params) {
                Some((_, es)) => es.push(row.energy.computed),
                None => sets.push((row.params, vec![row.energy.computed])),
            }
        }
    }
    for (p, aim) in &sets {
        let levels = oracle::solve(p, aim.len(), DEFAULT_INTERVALS).expect("oracle solves");
        for (l, e) in levels.iter().zip(aim) {
            worst = worst.max((l.extrapolated - e).abs());
            nodes_ok &= l.nodes == l.level;
        }
    }
    report(
        8,
        worst < 5e-3 && nodes_ok && sets.len() == 6,
        format!("{} parameter sets, n ≤ 5: max |E_fd − E_aim| {worst:.2e}; node counts equal levels: {nodes_ok}", sets.len()),
    )
}

fn criterion9() -> Outcome {
    let mut worst = 0.0f64;
    let mut counts_agree = true;
    let p = Precision::digits(EXTENDED_DIGITS);
    for (gamma, b) in [(TABLE1_GAMMA, TABLE1_B), (0.5, 2.0)] {
        for n in 0..=5 {
            let at = |y0: f64| quasi_spectrum::<Mp>(n, gamma, b, y0, p).expect("quasi spectrum");
            let (x, y) = (at(0.2), at(0.5));
            counts_agree &= x.len() == y.len();
            for (u, v) in x.iter().zip(&y) {
                worst = worst.max((u.omega.clone() - &v.omega).abs().to_f64());
            }
        }
    }
    report(9, worst < 1e-8 && counts_agree, format!("y₀ = 0.2 vs 0.5, n ≤ 5: max |Δω| {worst:.2e}"))
}

fn criterion10() -> Outcome {
    let config = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    let coeffs = |len: usize| prop::collection::vec(-1.0f64..1.0, len);
    let pair = (1usize..=10).prop_flat_map(move |len| (-0.9f64..0.9, coeffs(len), coeffs(len), coeffs(len)));
    let s = |c: f64, v: &[f64]| Series1::from_coeffs(c, v.to_vec()).expect("series");
    let bound = |a: &[f64], b: &[f64], k: usize| (0..=k).map(|i| a[i].abs() * b[k - i].abs()).sum::<f64>();
    let eps = f64::EPSILON;
    let mut results: Vec<(&str, Result<(), String>)> = Vec::new();

    // exact on integer coefficients, within 10 ulp of |a|·|d| on reals
    let ints = (1usize..=10).prop_flat_map(|len| {
        let v = move || prop::collection::vec((-100i32..=100).prop_map(f64::from), len);
        (-0.9f64..0.9, v(), v(), v())
    });
    let mut runner = TestRunner::new(config.clone());
    results.push(("ring axioms", runner.run(&ints, |(c, a, b, d)| {
        let (sa, sb, sd) = (s(c, &a), s(c, &b), s(c, &d));
        let l = sa.add(&sb).unwrap().mul(&sd).unwrap();
        let r = sa.mul(&sd).unwrap().add(&sb.mul(&sd).unwrap()).unwrap();
        prop_assert_eq!(l.coeffs().to_vec(), r.coeffs().to_vec());
        prop_assert_eq!(sa.mul(&sb).unwrap().coeffs().to_vec(), sb.mul(&sa).unwrap().coeffs().to_vec());
        let assoc = sa.mul(&sb).unwrap().mul(&sd).unwrap();
        prop_assert_eq!(assoc.coeffs().to_vec(), sa.mul(&sb.mul(&sd).unwrap()).unwrap().coeffs().to_vec());
        Ok(())
    }).map_err(|e| e.to_string())));

    let mut runner = TestRunner::new(config.clone());
    results.push(("distributivity", runner.run(&pair, |(c, a, b, d)| {
        let (sa, sb, sd) = (s(c, &a), s(c, &b), s(c, &d));
        let l = sa.add(&sb).unwrap().mul(&sd).unwrap();
        let r = sa.mul(&sd).unwrap().add(&sb.mul(&sd).unwrap()).unwrap();
        for k in 0..=l.order() {
            let tol = 10.0 * eps * (bound(&a, &d, k) + bound(&b, &d, k));
            prop_assert!((l.coeffs()[k] - r.coeffs()[k]).abs() <= tol);
        }
        Ok(())
    }).map_err(|e| e.to_string())));

    let mut runner = TestRunner::new(config.clone());
    results.push(("Leibniz", runner.run(&pair, |(c, a, b, _)| {
        prop_assume!(a.len() >= 2);
        let (sa, sb) = (s(c, &a), s(c, &b));
        let l = sa.mul(&sb).unwrap().derivative().unwrap();
        let o = l.order();
        let r = sa.derivative().unwrap().mul_to(&sb.truncate(o), o).unwrap()
            .add(&sa.truncate(o).mul_to(&sb.derivative().unwrap(), o).unwrap()).unwrap();
        for k in 0..=o {
            prop_assert!((l.coeffs()[k] - r.coeffs()[k]).abs() <= 10.0 * eps * (k + 1) as f64 * bound(&a, &b, k + 1));
        }
        Ok(())
    }).map_err(|e| e.to_string())));

    let mut runner = TestRunner::new(config.clone());
    results.push(("geometric series", runner.run(&(-0.9f64..0.9, -2.0f64..2.0, 1usize..=20), |(c, r, order)| {
        let mut v = vec![0.0; order + 1];
        v[0] = 1.0;
        v[1] = -r;
        let q = Series1::constant(1.0, c, order).div(&s(c, &v)).unwrap();
        for (k, x) in q.coeffs().iter().enumerate() {
            let e = r.powi(k as i32);
            prop_assert!((x - e).abs() <= 10.0 * (k + 1) as f64 * eps * e.abs());
        }
        Ok(())
    }).map_err(|e| e.to_string())));

    let mut runner = TestRunner::new(config);
    let invertible = (pair, prop_oneof![0.5f64..2.0, -2.0f64..-0.5]);
    results.push(("div∘mul", runner.run(&invertible, |((c, a, mut b, _), b0)| {
        b[0] = b0;
        let p = Precision::digits(EXTENDED_DIGITS);
        let m = |v: &[f64]| {
            Series1::from_coeffs(Mp::with_precision(c, p), v.iter().map(|&x| Mp::with_precision(x, p)).collect()).unwrap()
        };
        let (sa, sb) = (m(&a), m(&b));
        let back = sa.mul(&sb).unwrap().div(&sb).unwrap();
        for (x, y) in back.coeffs().iter().zip(sa.coeffs()) {
            prop_assert!((x.clone() - y).abs().to_f64() < 1e-30);
        }
        Ok(())
    }).map_err(|e| e.to_string())));

    let failed: Vec<&str> = results.iter().filter(|(_, r)| r.is_err()).map(|(n, _)| *n).collect();
    for (name, r) in &results {
        if let Err(e) = r {
            println!("    {name}: {e}");
        }
    }
    report(
        10,
        failed.is_empty(),
        format!("ring axioms, distributivity, Leibniz, geometric series, div∘mul over 1000 cases each; failing: {failed:?}"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut outcomes = vec![criterion1(), criterion2()];
    let (t2, d2) = table(2);
    outcomes.push(criterion3(&t2, d2));
    let (t3, _) = table(3);
    let (t4, _) = table(4);
    outcomes.push(criterion4(&t3, &t4));
    let (t5, d5) = table(5);
    outcomes.push(criterion5(&t5, d5));
    outcomes.push(criterion6());
    outcomes.push(criterion7());
    outcomes.push(criterion8(&[&t2, &t3, &t4, &t5]));
    outcomes.push(criterion9());
    outcomes.push(criterion10());

    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria pass ({:.1?})", outcomes.len(), started.elapsed());

    let mut unexpected = false;
    for o in &outcomes {
        if o.id == KNOWN_FAILURE.0 {
            // the value part of the criterion must still hold
            if o.passed || !o.detail.contains("within 1e-3") {
                println!("criterion {} changed status: {}", o.id, o.detail);
                unexpected = true;
            } else {
                println!("criterion {} fails as expected: {}", o.id, KNOWN_FAILURE.1);
            }
        } else if !o.passed {
            unexpected = true;
        }
    }
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
