//! Truncated complex power series in one and two variables.
//!
//! Every operation is exact modulo the truncation: `u^{D+1}` for
//! [`UnivariateSeries`] and the box `m <= D, n <= D` for [`BivariateSeries`].

use crate::{Error, Result, C64};

/// `c_0 + c_1 u + ... + c_D u^D`, arithmetic modulo `u^{D+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSeries {
    coeffs: Vec<C64>,
}

impl UnivariateSeries {
    /// The zero series with `coeff_count` coefficients (degree bound `coeff_count - 1`).
    pub fn zero(coeff_count: usize) -> Self {
        assert!(coeff_count >= 1, "a series needs at least one coefficient");
        UnivariateSeries {
            coeffs: vec![C64::new(0.0, 0.0); coeff_count],
        }
    }

    pub fn one(coeff_count: usize) -> Self {
        let mut s = Self::zero(coeff_count);
        s.coeffs[0] = C64::new(1.0, 0.0);
        s
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        UnivariateSeries { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn check_bound(&self, other: &Self) -> Result<()> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::Dimension(format!(
                "degree bounds {} and {}",
                self.degree_bound(),
                other.degree_bound()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(UnivariateSeries { coeffs })
    }

    pub fn scale(&self, s: C64) -> Self {
        UnivariateSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let len = self.coeffs.len();
        let mut out = vec![C64::new(0.0, 0.0); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs[..len - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(UnivariateSeries { coeffs: out })
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(Error::SingularInput(
                "reciprocal of a series with zero constant term".into(),
            ));
        }
        let len = self.coeffs.len();
        let mut inv = vec![C64::new(0.0, 0.0); len];
        inv[0] = c0.inv();
        for n in 1..len {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=n {
                acc += self.coeffs[k] * inv[n - k];
            }
            inv[n] = -acc * inv[0];
        }
        Ok(UnivariateSeries { coeffs: inv })
    }

    /// Principal logarithm; the constant term must be exactly 1.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != C64::new(1.0, 0.0) {
            return Err(Error::Branch(format!("{}", self.coeffs[0])));
        }
        let mut w = self.clone();
        w.coeffs[0] = C64::new(0.0, 0.0);
        let mut sum = Self::zero(self.len());
        let mut power = w.clone();
        for k in 1..self.len() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            for (s, p) in sum.coeffs.iter_mut().zip(&power.coeffs) {
                *s += p * (sign / k as f64);
            }
            power = power.mul(&w)?;
            if power.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0)) {
                break;
            }
        }
        Ok(sum)
    }

    pub fn eval(&self, u: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * u + c)
    }
}

/// Coefficients of `(1 + u)^gamma` on the principal branch, constant term 1.
pub fn series_binomial(gamma: f64, coeff_count: usize) -> UnivariateSeries {
    assert!(coeff_count >= 1, "coeff_count must be at least 1");
    let mut coeffs = Vec::with_capacity(coeff_count);
    let mut c = 1.0;
    coeffs.push(C64::new(1.0, 0.0));
    for j in 1..coeff_count {
        c *= (gamma - (j - 1) as f64) / j as f64;
        coeffs.push(C64::new(c, 0.0));
    }
    UnivariateSeries { coeffs }
}

/// `sum c[m][n] u^m v^n` over the box `0 <= m, n <= D`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries {
    bound: usize,
    coeffs: Vec<C64>,
}

impl BivariateSeries {
    pub fn zero(bound: usize) -> Self {
        let side = bound + 1;
        BivariateSeries {
            bound,
            coeffs: vec![C64::new(0.0, 0.0); side * side],
        }
    }

    pub fn one(bound: usize) -> Self {
        let mut s = Self::zero(bound);
        s.coeffs[0] = C64::new(1.0, 0.0);
        s
    }

    /// Builds from a function of the bidegree.
    pub fn from_fn(bound: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut s = Self::zero(bound);
        for m in 0..=bound {
            for n in 0..=bound {
                s.coeffs[m * (bound + 1) + n] = f(m, n);
            }
        }
        s
    }

    pub fn degree_bound(&self) -> usize {
        self.bound
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.coeffs[m * (self.bound + 1) + n]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, value: C64) {
        let side = self.bound + 1;
        self.coeffs[m * side + n] = value;
    }

    /// Adds `value` to the coefficient of `u^m v^n`; terms outside the box are dropped.
    pub fn add_term(&mut self, m: usize, n: usize, value: C64) {
        if m <= self.bound && n <= self.bound {
            let side = self.bound + 1;
            self.coeffs[m * side + n] += value;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_bound(&self, other: &Self) -> Result<()> {
        if self.bound != other.bound {
            return Err(Error::Dimension(format!(
                "bivariate degree bounds {} and {}",
                self.bound, other.bound
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(BivariateSeries {
            bound: self.bound,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(BivariateSeries {
            bound: self.bound,
            coeffs,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        BivariateSeries {
            bound: self.bound,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Box-truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_bound(other)?;
        let side = self.bound + 1;
        let mut out = vec![C64::new(0.0, 0.0); side * side];
        for p in 0..side {
            for r in 0..side {
                let a = self.coeffs[p * side + r];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for q in 0..side - p {
                    let row_b = &other.coeffs[q * side..q * side + side - r];
                    let row_out = &mut out[(p + q) * side + r..(p + q) * side + side];
                    for (o, b) in row_out.iter_mut().zip(row_b) {
                        *o += a * b;
                    }
                }
            }
        }
        Ok(BivariateSeries {
            bound: self.bound,
            coeffs: out,
        })
    }

    /// Principal logarithm by the Mercator series `sum (-1)^{k+1} w^k / k`,
    /// `w = a - 1`. The constant term must be exactly 1; the sum stops as soon
    /// as `w^k` vanishes in the box.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != C64::new(1.0, 0.0) {
            return Err(Error::Branch(format!("{}", self.coeffs[0])));
        }
        let mut w = self.clone();
        w.coeffs[0] = C64::new(0.0, 0.0);
        let mut sum = Self::zero(self.bound);
        let mut power = w.clone();
        for k in 1..=(2 * self.bound).max(1) {
            if power.is_zero() {
                break;
            }
            let factor = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            for (s, p) in sum.coeffs.iter_mut().zip(&power.coeffs) {
                *s += p * factor;
            }
            power = power.mul(&w)?;
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(series_binomial(1.0, 3).coeffs(), &[c(1.0), c(1.0), c(0.0)]);
        let b = series_binomial(2.0 / 3.0, 3);
        assert!((b.coeffs()[1].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((b.coeffs()[2].re + 1.0 / 9.0).abs() < 1e-15);
        let z = series_binomial(0.0, 5);
        assert_eq!(z.coeffs()[0], c(1.0));
        assert!(z.coeffs()[1..].iter().all(|x| *x == c(0.0)));
    }

    #[test]
    fn bivariate_mul_examples() {
        let mut a = BivariateSeries::one(2);
        a.set(1, 1, c(1.0));
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.get(0, 0), c(1.0));
        assert_eq!(sq.get(1, 1), c(2.0));
        assert_eq!(sq.get(2, 2), c(1.0));
        assert_eq!(a.mul(&BivariateSeries::one(2)).unwrap(), a);

        let mut uv = BivariateSeries::zero(1);
        uv.set(1, 1, c(1.0));
        assert!(uv.mul(&uv).unwrap().is_zero());
    }

    #[test]
    fn mismatched_bounds_are_rejected() {
        let a = BivariateSeries::one(2);
        let b = BivariateSeries::one(3);
        assert!(matches!(a.mul(&b), Err(Error::Dimension(_))));
        let u = UnivariateSeries::one(2);
        assert!(matches!(u.mul(&UnivariateSeries::one(3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn log_of_one_is_zero() {
        assert!(BivariateSeries::one(4).log().unwrap().is_zero());
    }

    #[test]
    fn log_needs_unit_constant() {
        let a = BivariateSeries::one(2).scale(c(2.0));
        assert!(matches!(a.log(), Err(Error::Branch(_))));
        let u = UnivariateSeries::zero(3);
        assert!(matches!(u.log(), Err(Error::Branch(_))));
    }

    #[test]
    fn log_of_one_minus_t_uv_is_mercator() {
        let t = 0.5;
        let mut a = BivariateSeries::one(3);
        a.set(1, 1, c(-t));
        let l = a.log().unwrap();
        // log(1 - x) = -x - x^2/2 - x^3/3
        assert!((l.get(1, 1).re + 0.5).abs() < 1e-15);
        assert!((l.get(2, 2).re + 0.125).abs() < 1e-15);
        assert!((l.get(3, 3).re + 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(l.get(1, 2), c(0.0));
    }

    #[test]
    fn reciprocal_of_geometric() {
        // 1 / (1 - u) = 1 + u + u^2 + ...
        let s = UnivariateSeries::from_coeffs(vec![c(1.0), c(-1.0), c(0.0), c(0.0)]);
        let r = s.reciprocal().unwrap();
        assert!(r.coeffs().iter().all(|x| *x == c(1.0)));
        assert!(matches!(
            UnivariateSeries::zero(3).reciprocal(),
            Err(Error::SingularInput(_))
        ));
    }

    #[test]
    fn univariate_log_matches_mercator() {
        let s = UnivariateSeries::from_coeffs(vec![c(1.0), c(0.25), c(0.0), c(0.0), c(0.0)]);
        let l = s.log().unwrap();
        let x: f64 = 0.25;
        for k in 1..5 {
            let expected = if k % 2 == 1 { 1.0 } else { -1.0 } * x.powi(k as i32) / k as f64;
            assert!((l.coeffs()[k].re - expected).abs() < 1e-16);
        }
    }
}
