use super::{Jet, Scalar, SeriesError};

/// Truncated Taylor series `Σ c_j (y − center)^j`, `j = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series1<T> {
    center: T,
    coeffs: Vec<T>,
}

impl<T: Scalar> Series1<T> {
    /// Builds a series from its coefficients; `coeffs` must be non-empty.
    pub fn from_coeffs(center: T, coeffs: Vec<T>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Series1 { center, coeffs })
    }

    /// The constant series `c`.
    pub fn constant(c: T, center: T, order: usize) -> Self {
        let mut coeffs = vec![c.zero_like(); order + 1];
        coeffs[0] = c;
        Series1 { center, coeffs }
    }

    pub fn zero(center: T, order: usize) -> Self {
        let zero = center.zero_like();
        Self::constant(zero, center, order)
    }

    /// The identity function `y` expanded at `center`.
    pub fn variable(center: T, order: usize) -> Self {
        let mut s = Self::constant(center.clone(), center, order);
        if order >= 1 {
            s.coeffs[1] = s.center.one_like();
        }
        s
    }

    pub fn center(&self) -> &T {
        &self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Option<&T> {
        self.coeffs.get(j)
    }

    /// Value at the expansion point.
    pub fn value(&self) -> &T {
        &self.coeffs[0]
    }

    fn check_center(&self, other: &Self) -> Result<(), SeriesError> {
        if self.center == other.center {
            Ok(())
        } else {
            Err(SeriesError::CenterMismatch {
                left: self.center.to_f64(),
                right: other.center.to_f64(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b)
            .collect();
        Ok(Series1 { center: self.center.clone(), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() - b)
            .collect();
        Ok(Series1 { center: self.center.clone(), coeffs })
    }

    /// Cauchy product truncated to the smaller operand order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let order = self.order().min(other.order());
        self.mul_to(other, order)
    }

    /// Cauchy product truncated to `order` (which must not exceed either operand's order).
    pub fn mul_to(&self, other: &Self, order: usize) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let order = order.min(self.order()).min(other.order());
        let mut coeffs = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.center.zero_like();
            for i in 0..=k {
                acc.add_mul(&self.coeffs[i], &other.coeffs[k - i]);
            }
            coeffs.push(acc);
        }
        Ok(Series1 { center: self.center.clone(), coeffs })
    }

    /// Quotient with the default singular-division threshold.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let threshold = self.center.division_threshold();
        self.div_with_threshold(other, &threshold)
    }

    /// Quotient `self / other`; fails if `|other(center)| <= threshold`.
    pub fn div_with_threshold(&self, other: &Self, threshold: &T) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let b0 = &other.coeffs[0];
        if b0.abs() <= *threshold {
            return Err(SeriesError::SingularDivision {
                constant: b0.to_f64(),
                threshold: threshold.to_f64(),
            });
        }
        let order = self.order().min(other.order());
        let mut q: Vec<T> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                acc.sub_mul(&other.coeffs[j], &q[k - j]);
            }
            acc /= b0;
            q.push(acc);
        }
        Ok(Series1 { center: self.center.clone(), coeffs: q })
    }

    /// d/dy; the order drops by one.
    pub fn derivative(&self) -> Result<Self, SeriesError> {
        if self.order() == 0 {
            return Err(SeriesError::OrderExhausted);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(j, c)| c.clone() * &c.lift((j + 1) as f64))
            .collect();
        Ok(Series1 { center: self.center.clone(), coeffs })
    }

    /// Antiderivative vanishing at the center; the order rises by one.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(self.center.zero_like());
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / &c.lift((j + 1) as f64));
        }
        Series1 { center: self.center.clone(), coeffs }
    }

    /// `exp` of the series (same order).
    pub fn exp(&self) -> Self {
        // e' = a' e, so (k) e_k = Σ_{j=1..k} j a_j e_{k-j}
        let order = self.order();
        let mut e: Vec<T> = Vec::with_capacity(order + 1);
        e.push(self.coeffs[0].exp());
        for k in 1..=order {
            let mut acc = self.center.zero_like();
            for j in 1..=k {
                let ja = self.coeffs[j].clone() * &self.center.lift(j as f64);
                acc.add_mul(&ja, &e[k - j]);
            }
            acc /= &self.center.lift(k as f64);
            e.push(acc);
        }
        Series1 { center: self.center.clone(), coeffs: e }
    }

    pub fn scale(&self, c: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c).collect();
        Series1 { center: self.center.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| -a.clone()).collect();
        Series1 { center: self.center.clone(), coeffs }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Series1 { center: self.center.clone(), coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Evaluates the truncated polynomial at `y` (Horner in `y − center`).
    pub fn eval(&self, y: &T) -> T {
        let t = y.clone() - &self.center;
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs[..self.order()].iter().rev() {
            acc *= &t;
            acc += c;
        }
        acc
    }
}

impl<T: Scalar> Jet for Series1<T> {
    type Scalar = T;

    fn order(&self) -> usize {
        Series1::order(self)
    }

    fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        Series1::add(self, other)
    }

    fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        Series1::sub(self, other)
    }

    fn mul_to(&self, other: &Self, order: usize) -> Result<Self, SeriesError> {
        Series1::mul_to(self, other, order)
    }

    fn derivative(&self) -> Result<Self, SeriesError> {
        Series1::derivative(self)
    }

    fn truncate(&self, order: usize) -> Self {
        Series1::truncate(self, order)
    }

    fn scale(&self, c: &T) -> Self {
        Series1::scale(self, c)
    }

    fn center_magnitude(&self) -> T {
        self.coeffs[0].abs()
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(center: f64, c: &[f64]) -> Series1<f64> {
        Series1::from_coeffs(center, c.to_vec()).unwrap()
    }

    #[test]
    fn constructors() {
        assert_eq!(Series1::constant(1.0, 0.5, 3).coeffs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(Series1::constant(0.0, 0.5, 0).coeffs(), &[0.0]);
        assert_eq!(Series1::variable(0.5, 2).coeffs(), &[0.5, 1.0, 0.0]);
    }

    #[test]
    fn difference_of_squares() {
        let a = s(0.3, &[1.0, 1.0, 0.0]);
        let b = s(0.3, &[1.0, -1.0, 0.0]);
        assert_eq!(a.mul(&b).unwrap().coeffs(), &[1.0, 0.0, -1.0]);
    }

    #[test]
    fn additive_inverse_and_truncation() {
        let a = s(0.0, &[1.5, -2.0, 0.25]);
        assert!(a.add(&a.neg()).unwrap().coeffs().iter().all(|c| *c == 0.0));
        let one_plus_t = s(0.0, &[1.0, 1.0]);
        assert_eq!(one_plus_t.mul(&one_plus_t).unwrap().coeffs(), &[1.0, 2.0]);
    }

    #[test]
    fn geometric_series() {
        let one = Series1::constant(1.0, 0.0, 4);
        let q = one.div(&s(0.0, &[1.0, -1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(q.coeffs(), &[1.0; 5]);
    }

    #[test]
    fn self_division_and_singular_divisor() {
        let a = s(0.2, &[2.0, -1.0, 3.0]);
        let q = a.div(&a).unwrap();
        assert!((q.coeffs()[0] - 1.0).abs() < 1e-15);
        assert!(q.coeffs()[1..].iter().all(|c| c.abs() < 1e-15));
        let err = a.div(&s(0.2, &[0.0, 1.0, 0.0])).unwrap_err();
        assert!(matches!(err, SeriesError::SingularDivision { .. }));
    }

    #[test]
    fn center_mismatch_is_rejected() {
        let a = s(0.0, &[1.0]);
        let b = s(0.5, &[1.0]);
        assert!(matches!(a.add(&b), Err(SeriesError::CenterMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(SeriesError::CenterMismatch { .. })));
    }

    #[test]
    fn derivatives() {
        let t2 = s(0.0, &[0.0, 0.0, 1.0]);
        let d = t2.derivative().unwrap();
        assert_eq!(d.coeffs(), &[0.0, 2.0]);
        let c = Series1::constant(4.0, 0.0, 3).derivative().unwrap();
        assert!(c.coeffs().iter().all(|x| *x == 0.0));
        assert!(matches!(s(0.0, &[1.0]).derivative(), Err(SeriesError::OrderExhausted)));

        let mut a = s(0.1, &[1.0, -2.0, 0.5, 3.0, 7.0]);
        for _ in 0..4 {
            a = a.derivative().unwrap();
        }
        assert_eq!(a.order(), 0);
        assert_eq!(*a.value(), 24.0 * 7.0);
    }

    #[test]
    fn exp_of_linear_series() {
        let t = s(0.0, &[0.0, 1.0, 0.0, 0.0, 0.0]);
        let e = t.exp();
        let expected = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (c, x) in e.coeffs().iter().zip(expected) {
            assert!((c - x).abs() < 1e-15);
        }
    }

    #[test]
    fn integral_inverts_derivative() {
        let a = s(0.0, &[3.0, 2.0, 6.0]);
        let i = a.integral();
        assert_eq!(i.coeffs(), &[0.0, 3.0, 1.0, 2.0]);
        assert_eq!(i.derivative().unwrap().coeffs(), a.coeffs());
    }

    #[test]
    fn eval_horner() {
        let a = s(1.0, &[1.0, 2.0, 3.0]);
        // 1 + 2(0.5) + 3(0.25)
        assert_eq!(a.eval(&1.5), 2.75);
    }
}
