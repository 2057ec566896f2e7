use aimwell::series::{Mp, Precision, Scalar, Series1, Series2};
use proptest::prelude::*;

const CASES: u32 = 1000;
const ULP: f64 = f64::EPSILON;

fn series(center: f64, coeffs: &[f64]) -> Series1<f64> {
    Series1::from_coeffs(center, coeffs.to_vec()).unwrap()
}

fn mp_series(center: f64, coeffs: &[f64], digits: u32) -> Series1<Mp> {
    let p = Precision::digits(digits);
    let c = Mp::with_precision(center, p);
    Series1::from_coeffs(c, coeffs.iter().map(|&x| Mp::with_precision(x, p)).collect()).unwrap()
}

/// Coefficient `k` of `|a|·|b|`, the scale of rounding in a Cauchy product.
fn abs_product(a: &[f64], b: &[f64], k: usize) -> f64 {
    (0..=k).map(|i| a[i].abs() * b[k - i].abs()).sum()
}

fn int_coeffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-100i32..=100).prop_map(f64::from), len)
}

fn real_coeffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

fn triple(
    coeffs: fn(usize) -> BoxedStrategy<Vec<f64>>,
) -> impl Strategy<Value = (f64, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..=9).prop_flat_map(move |len| (-0.9f64..0.9, coeffs(len), coeffs(len), coeffs(len)))
}

fn ints(len: usize) -> BoxedStrategy<Vec<f64>> {
    int_coeffs(len).boxed()
}

fn reals(len: usize) -> BoxedStrategy<Vec<f64>> {
    real_coeffs(len).boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn ring_axioms_exact_on_integers((c, a, b, d) in triple(ints)) {
        let (a, b, d) = (series(c, &a), series(c, &b), series(c, &d));
        let left = a.add(&b).unwrap().mul(&d).unwrap();
        let right = a.mul(&d).unwrap().add(&b.mul(&d).unwrap()).unwrap();
        prop_assert_eq!(left.coeffs().to_vec(), right.coeffs().to_vec());
        prop_assert_eq!(a.mul(&b).unwrap().coeffs().to_vec(), b.mul(&a).unwrap().coeffs().to_vec());
        let assoc_l = a.mul(&b).unwrap().mul(&d).unwrap();
        let assoc_r = a.mul(&b.mul(&d).unwrap()).unwrap();
        prop_assert_eq!(assoc_l.coeffs().to_vec(), assoc_r.coeffs().to_vec());
        let zero = Series1::zero(c, a.order());
        prop_assert_eq!(a.add(&zero).unwrap().coeffs().to_vec(), a.coeffs().to_vec());
        prop_assert!(a.add(&a.neg()).unwrap().coeffs().iter().all(|x| *x == 0.0));
        let one = Series1::constant(1.0, c, a.order());
        prop_assert_eq!(a.mul(&one).unwrap().coeffs().to_vec(), a.coeffs().to_vec());
    }

    #[test]
    fn distributivity_within_ten_ulp((c, a, b, d) in triple(reals)) {
        let (sa, sb, sd) = (series(c, &a), series(c, &b), series(c, &d));
        let left = sa.add(&sb).unwrap().mul(&sd).unwrap();
        let right = sa.mul(&sd).unwrap().add(&sb.mul(&sd).unwrap()).unwrap();
        for k in 0..=left.order() {
            let scale = abs_product(&a, &d, k) + abs_product(&b, &d, k);
            prop_assert!((left.coeffs()[k] - right.coeffs()[k]).abs() <= 10.0 * ULP * scale);
        }
    }

    #[test]
    fn leibniz_rule((c, a, b, _d) in triple(reals)) {
        prop_assume!(a.len() >= 2);
        let (sa, sb) = (series(c, &a), series(c, &b));
        let left = sa.mul(&sb).unwrap().derivative().unwrap();
        let da = sa.derivative().unwrap();
        let db = sb.derivative().unwrap();
        let order = left.order();
        let right = da.mul_to(&sb.truncate(order), order).unwrap()
            .add(&sa.truncate(order).mul_to(&db, order).unwrap()).unwrap();
        for k in 0..=order {
            let scale = (k + 1) as f64 * abs_product(&a, &b, k + 1);
            prop_assert!((left.coeffs()[k] - right.coeffs()[k]).abs() <= 10.0 * ULP * scale);
        }
    }

    #[test]
    fn leibniz_rule_exact_on_integers((c, a, b, _d) in triple(ints)) {
        prop_assume!(a.len() >= 2);
        let (sa, sb) = (series(c, &a), series(c, &b));
        let left = sa.mul(&sb).unwrap().derivative().unwrap();
        let order = left.order();
        let right = sa.derivative().unwrap().mul_to(&sb.truncate(order), order).unwrap()
            .add(&sa.truncate(order).mul_to(&sb.derivative().unwrap(), order).unwrap()).unwrap();
        prop_assert_eq!(left.coeffs().to_vec(), right.coeffs().to_vec());
    }

    #[test]
    fn geometric_series(c in -0.9f64..0.9, r in -2.0f64..2.0, order in 1usize..=20) {
        // 1 / (1 − r t) = Σ rᵏ tᵏ
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = 1.0;
        coeffs[1] = -r;
        let one = Series1::constant(1.0, c, order);
        let q = one.div(&series(c, &coeffs)).unwrap();
        for (k, x) in q.coeffs().iter().enumerate() {
            let expected = r.powi(k as i32);
            prop_assert!((x - expected).abs() <= 10.0 * (k + 1) as f64 * ULP * expected.abs().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn div_mul_round_trip(
        (c, a, b) in (1usize..=12).prop_flat_map(|len| (-0.9f64..0.9, real_coeffs(len), real_coeffs(len))),
        b0 in prop_oneof![0.5f64..2.0, -2.0f64..-0.5],
    ) {
        let mut b = b;
        b[0] = b0;
        let (sa, sb) = (mp_series(c, &a, 50), mp_series(c, &b, 50));
        let back = sa.mul(&sb).unwrap().div(&sb).unwrap();
        for (x, y) in back.coeffs().iter().zip(sa.coeffs()) {
            prop_assert!((x.clone() - y).abs().to_f64() < 1e-30);
        }
        // in double precision the round trip holds to a conditioning-dependent tolerance
        let (da, db) = (series(c, &a), series(c, &b));
        let back = da.mul(&db).unwrap().div(&db).unwrap();
        let growth = (b.iter().map(|x| x.abs()).sum::<f64>() / b0.abs()).powi(a.len() as i32);
        for (x, y) in back.coeffs().iter().zip(da.coeffs()) {
            prop_assert!((x - y).abs() <= 100.0 * ULP * growth);
        }
    }

    #[test]
    fn series2_slices_commute_with_products(
        c in -0.9f64..0.9,
        (y_len, mu_len) in (1usize..=6, 1usize..=4),
        seed in prop::collection::vec(-1.0f64..1.0, 48),
    ) {
        let rows = |offset: usize| -> Vec<Vec<f64>> {
            (0..y_len).map(|j| (0..mu_len).map(|k| seed[(offset + j * mu_len + k) % seed.len()]).collect()).collect()
        };
        let a = Series2::from_rows(c, rows(0)).unwrap();
        let b = Series2::from_rows(c, rows(24)).unwrap();
        let ab = a.mul(&b).unwrap();
        for k in 0..mu_len {
            let mut expected = Series1::zero(c, y_len - 1);
            for i in 0..=k {
                let term = a.slice_mu(i).unwrap().mul(&b.slice_mu(k - i).unwrap()).unwrap();
                expected = expected.add(&term).unwrap();
            }
            let got = ab.slice_mu(k).unwrap();
            for (x, y) in got.coeffs().iter().zip(expected.coeffs()) {
                prop_assert!((x - y).abs() <= 1e3 * ULP);
            }
        }
        let sum = a.add(&b).unwrap();
        for k in 0..mu_len {
            let expected = a.slice_mu(k).unwrap().add(&b.slice_mu(k).unwrap()).unwrap();
            prop_assert_eq!(sum.slice_mu(k).unwrap().coeffs().to_vec(), expected.coeffs().to_vec());
        }
    }
}
