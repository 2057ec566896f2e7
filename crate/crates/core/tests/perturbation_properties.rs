use aimwell::aim::{converge_level, eigenfunction, iterate, ConvergeOptions, EigenfunctionOptions};
use aimwell::perturbation::{
    eigenfunction_corrections, omega0_formula, omega2_formula, omega_perturbed, perturbed_energy,
    solve_corrections, PerturbModel, K_MAX,
};
use aimwell::series::{Mp, Precision, Scalar};
use aimwell::well::{WellParams, WellProblem};
use proptest::prelude::*;
use proptest::sample::select;

const Y0: f64 = 0.5;

fn digits(d: u32) -> Precision {
    Precision::digits(d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn numeric_corrections_match_closed_forms(
        n in 0usize..=5,
        sigma in select(vec![3.0, 4.5, 5.5, 6.0]),
        a in select(vec![0.25, 0.5, 1.0]),
    ) {
        let model = PerturbModel::<Mp>::new(sigma - 1.5, a, 0.3, Y0, digits(40)).unwrap();
        let s = solve_corrections(&model, n).unwrap();
        prop_assert!((s.omega0.to_f64() - omega0_formula(n, sigma)).abs() < 1e-8);
        prop_assert!(s.omega1.to_f64().abs() < 1e-9);
        let (w2, _) = omega2_formula(n, sigma, a).unwrap();
        prop_assert!((s.omega2.to_f64() - w2).abs() < 1e-8);
        prop_assert_eq!(s.expansion_parameter, "B");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn perturbed_energy_is_omega_plus_shift(
        n in 0usize..=10,
        a in -6.0f64..6.0,
        b in -6.0f64..6.0,
        gamma in 0.0f64..6.0,
    ) {
        let p = WellParams::new(a, b, gamma).unwrap();
        let e = perturbed_energy(n, &p).unwrap();
        let w = omega_perturbed(n, &p).unwrap();
        let shift = (gamma + 1.0) * (gamma + 1.0);
        prop_assert!((e - shift - w).abs() <= 8.0 * f64::EPSILON * e.abs().max(w.abs()).max(shift));
    }
}

#[test]
fn free_well_is_exact_in_perturbation_theory() {
    for gamma in [0.0, 0.5, 1.0, 3.0] {
        let p = WellParams::new(0.0, 0.0, gamma).unwrap();
        let problem = WellProblem::<f64>::new(p, Y0, Precision::DOUBLE, 5).unwrap();
        for n in 0..=5 {
            let exact = (n as f64 + gamma + 1.0).powi(2);
            let ep = perturbed_energy(n, &p).unwrap();
            assert!((ep - exact).abs() < 1e-8);
            let direct = converge_level(&problem, n, ConvergeOptions { tol: 1e-6, max_iter: 20 }).unwrap();
            assert!((direct.eigenvalue + (gamma + 1.0).powi(2) - ep).abs() < 1e-8);
        }
    }
}

#[test]
fn uncoupled_model_has_no_corrections() {
    let model = PerturbModel::<Mp>::new(3.0, 0.5, 1.0, Y0, digits(40)).unwrap().without_coupling();
    for n in 0..=3 {
        let s = solve_corrections(&model, n).unwrap();
        assert!(s.omega1.to_f64().abs() < 1e-20);
        assert!(s.omega2.to_f64().abs() < 1e-20);
        assert!((s.omega0.to_f64() - omega0_formula(n, 4.5)).abs() < 1e-12);
    }
}

/// Correction factors at coupling `b` and the direct eigenfunctions at `b`
/// and at zero coupling, on `grid_y`.
fn factors_and_direct(level: usize, gamma: f64, a: f64, b: f64, grid_y: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let model = PerturbModel::<Mp>::new(gamma, a, b, Y0, digits(40)).unwrap();
    let s = solve_corrections(&model, level).unwrap();
    let omegas = [s.omega0.clone(), s.omega1.clone(), s.omega2.clone()];
    let depth = s.depth.max(20);
    let seq = model.sequence_with_order(&omegas, depth, depth + 40).unwrap();
    let factors = eigenfunction_corrections(&seq, b, grid_y)
        .unwrap()
        .into_iter()
        .map(|row| row.iter().map(Scalar::to_f64).collect())
        .collect();

    let grid_x: Vec<f64> = grid_y.iter().map(|y| y.acos()).collect();
    let direct = |p: WellParams| -> Vec<f64> {
        let problem = WellProblem::<Mp>::new(p, Y0, digits(50), level).unwrap();
        let r = converge_level(&problem, level, ConvergeOptions::default()).unwrap();
        let seq = iterate(&problem, &r.eigenvalue, r.iterations_used).unwrap();
        eigenfunction(&problem, &r.eigenvalue, &seq, &grid_x, EigenfunctionOptions::default())
            .unwrap()
            .iter()
            .map(Scalar::to_f64)
            .collect()
    };
    let coupled = direct(WellParams::new(2.0 * b * a, b, gamma).unwrap());
    let free = direct(WellParams::new(0.0, 0.0, gamma).unwrap());
    (factors, coupled, free)
}

#[test]
fn correction_factors_rebuild_the_eigenfunction() {
    let grid_y: Vec<f64> = (0..=24).map(|i| Y0 - 0.3 + 0.6 * i as f64 / 24.0).collect();
    for level in [0, 1] {
        let (factors, coupled, free) = factors_and_direct(level, 3.0, 0.5, 0.05, &grid_y);
        assert_eq!(factors.len(), K_MAX + 1);
        for i in 0..grid_y.len() {
            let product: f64 = factors.iter().map(|row| row[i]).product();
            assert!((product - coupled[i]).abs() < 1e-3, "level {level}, y = {}", grid_y[i]);
            assert!((factors[0][i] - free[i]).abs() < 1e-6, "level {level}, y = {}", grid_y[i]);
        }
    }
}

#[test]
fn correction_factors_reject_points_past_the_singularity() {
    let model = PerturbModel::<Mp>::new(3.0, 0.5, 0.05, Y0, digits(40)).unwrap();
    let s = solve_corrections(&model, 0).unwrap();
    let seq = model.sequence_with_order(&[s.omega0, s.omega1, s.omega2], 4, 30).unwrap();
    assert!(eigenfunction_corrections(&seq, 0.05, &[0.9, 1.2]).is_err());
}
