use super::{Jet, Scalar, Series1, SeriesError};

/// Truncated bivariate series `Σ c_{j,k} (y − center)^j μ^k` with
/// `j ≤ y_order` and `k ≤ mu_order`.
///
/// Coefficients are stored row-major by power of `y − center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series2<T> {
    center: T,
    y_order: usize,
    mu_order: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> Series2<T> {
    pub fn zero(center: T, y_order: usize, mu_order: usize) -> Self {
        let zero = center.zero_like();
        Series2 { center, y_order, mu_order, coeffs: vec![zero; (y_order + 1) * (mu_order + 1)] }
    }

    /// Builds a series from `rows[j][k]`, the coefficient of `(y − center)^j μ^k`.
    pub fn from_rows(center: T, rows: Vec<Vec<T>>) -> Result<Self, SeriesError> {
        let mu_len = rows.first().map(Vec::len).ok_or(SeriesError::Empty)?;
        if mu_len == 0 || rows.iter().any(|r| r.len() != mu_len) {
            return Err(SeriesError::Empty);
        }
        let y_order = rows.len() - 1;
        let coeffs = rows.into_iter().flatten().collect();
        Ok(Series2 { center, y_order, mu_order: mu_len - 1, coeffs })
    }

    /// Embeds a μ-independent series.
    pub fn from_series1(s: &Series1<T>, mu_order: usize) -> Self {
        let mut out = Self::zero(s.center().clone(), s.order(), mu_order);
        for (j, c) in s.coeffs().iter().enumerate() {
            *out.at_mut(j, 0) = c.clone();
        }
        out
    }

    pub fn center(&self) -> &T {
        &self.center
    }

    pub fn y_order(&self) -> usize {
        self.y_order
    }

    pub fn mu_order(&self) -> usize {
        self.mu_order
    }

    fn width(&self) -> usize {
        self.mu_order + 1
    }

    pub fn at(&self, j: usize, k: usize) -> &T {
        &self.coeffs[j * self.width() + k]
    }

    pub fn at_mut(&mut self, j: usize, k: usize) -> &mut T {
        let w = self.width();
        &mut self.coeffs[j * w + k]
    }

    /// The coefficients of `μ^k`, as a series in `y`.
    ///
    /// Because the grid stores Taylor coefficients, this is
    /// `(1/k!) ∂^k/∂μ^k` at `μ = 0`.
    pub fn slice_mu(&self, k: usize) -> Result<Series1<T>, SeriesError> {
        if k > self.mu_order {
            return Err(SeriesError::SliceOutOfRange { k, max: self.mu_order });
        }
        let coeffs = (0..=self.y_order).map(|j| self.at(j, k).clone()).collect();
        Series1::from_coeffs(self.center.clone(), coeffs)
    }

    /// Value at `y = center` as a polynomial in μ (coefficients ascending).
    pub fn center_row(&self) -> &[T] {
        &self.coeffs[..self.width()]
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.center != other.center {
            return Err(SeriesError::CenterMismatch {
                left: self.center.to_f64(),
                right: other.center.to_f64(),
            });
        }
        if self.mu_order != other.mu_order {
            return Err(SeriesError::MuOrderMismatch { left: self.mu_order, right: other.mu_order });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let y_order = self.y_order.min(other.y_order);
        let len = (y_order + 1) * self.width();
        let coeffs = self.coeffs[..len].iter().zip(&other.coeffs[..len]).map(|(a, b)| f(a, b)).collect();
        Ok(Series2 { center: self.center.clone(), y_order, mu_order: self.mu_order, coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.zip_with(other, |a, b| a.clone() + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.zip_with(other, |a, b| a.clone() - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let order = self.y_order.min(other.y_order);
        self.mul_to(other, order)
    }

    /// Product truncated to y-order `order` and to the common μ-order.
    pub fn mul_to(&self, other: &Self, order: usize) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let y_order = order.min(self.y_order).min(other.y_order);
        let kk = self.mu_order;
        let mut out = Self::zero(self.center.clone(), y_order, kk);
        for j in 0..=y_order {
            for i in 0..=j {
                for p in 0..=kk {
                    let a = self.at(i, p);
                    if a.is_zero() {
                        continue;
                    }
                    for q in 0..=(kk - p) {
                        let b = other.at(j - i, q);
                        out.at_mut(j, p + q).add_mul(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Quotient with the default singular-division threshold.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let threshold = self.center.division_threshold();
        self.div_with_threshold(other, &threshold)
    }

    /// Quotient; the divisor's `(0, 0)` coefficient must exceed `threshold` in magnitude.
    pub fn div_with_threshold(&self, other: &Self, threshold: &T) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let b00 = other.at(0, 0).clone();
        if b00.abs() <= *threshold {
            return Err(SeriesError::SingularDivision {
                constant: b00.to_f64(),
                threshold: threshold.to_f64(),
            });
        }
        let y_order = self.y_order.min(other.y_order);
        let kk = self.mu_order;
        let mut q = Self::zero(self.center.clone(), y_order, kk);
        for j in 0..=y_order {
            for k in 0..=kk {
                let mut acc = self.at(j, k).clone();
                for i in 0..=j {
                    for l in 0..=k {
                        if i == 0 && l == 0 {
                            continue;
                        }
                        acc.sub_mul(other.at(i, l), q.at(j - i, k - l));
                    }
                }
                acc /= &b00;
                *q.at_mut(j, k) = acc;
            }
        }
        Ok(q)
    }

    /// ∂/∂y; the y-order drops by one.
    pub fn derivative(&self) -> Result<Self, SeriesError> {
        if self.y_order == 0 {
            return Err(SeriesError::OrderExhausted);
        }
        let mut out = Self::zero(self.center.clone(), self.y_order - 1, self.mu_order);
        for j in 1..=self.y_order {
            let factor = self.center.lift(j as f64);
            for k in 0..=self.mu_order {
                *out.at_mut(j - 1, k) = self.at(j, k).clone() * &factor;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c).collect();
        Series2 { center: self.center.clone(), y_order: self.y_order, mu_order: self.mu_order, coeffs }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let y_order = order.min(self.y_order);
        let coeffs = self.coeffs[..(y_order + 1) * self.width()].to_vec();
        Series2 { center: self.center.clone(), y_order, mu_order: self.mu_order, coeffs }
    }
}

impl<T: Scalar> Jet for Series2<T> {
    type Scalar = T;

    fn order(&self) -> usize {
        self.y_order
    }

    fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        Series2::add(self, other)
    }

    fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        Series2::sub(self, other)
    }

    fn mul_to(&self, other: &Self, order: usize) -> Result<Self, SeriesError> {
        Series2::mul_to(self, other, order)
    }

    fn derivative(&self) -> Result<Self, SeriesError> {
        Series2::derivative(self)
    }

    fn truncate(&self, order: usize) -> Self {
        Series2::truncate(self, order)
    }

    fn scale(&self, c: &T) -> Self {
        Series2::scale(self, c)
    }

    fn center_magnitude(&self) -> T {
        let row = self.center_row();
        let mut best = row[0].abs();
        for c in &row[1..] {
            let a = c.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_finite)
    }
}
