//! Truncated univariate power series with a validity-radius estimate.
//!
//! The carrier type for the profile functions a(phi), b(phi) and the
//! auxiliary series z, zeta they are assembled from. Coefficients are generic
//! over [`Coeff`] so the same arithmetic runs in `f64` and in exact rationals.

use crate::error::{Error, Result};
use crate::scalar::Coeff;
use serde::{Deserialize, Serialize};

/// Floor applied to ratio-test radius estimates.
pub const RADIUS_FLOOR: f64 = 1e-3;

/// Polynomial truncation of an analytic function, valid on |t| <= radius.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T: Coeff> {
    coeffs: Vec<T>,
    radius: f64,
}

impl<T: Coeff> TruncatedSeries<T> {
    /// Series with coefficients c_0..c_N; `coeffs.len()` must be order + 1.
    pub fn new(coeffs: Vec<T>, radius: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::CoefficientCount { len: 0, order: 0 });
        }
        if !(radius > 0.0) {
            return Err(Error::NonPositiveRadius(radius));
        }
        Ok(Self { coeffs, radius })
    }

    pub fn constant(value: T, radius: f64) -> Self {
        Self {
            coeffs: vec![value],
            radius,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> T {
        self.coeffs.get(j).cloned().unwrap_or_else(T::zero)
    }

    fn check_radius(&self, t: f64) -> Result<()> {
        if t.abs() > self.radius {
            return Err(Error::OutOfRadius {
                t,
                radius: self.radius,
            });
        }
        Ok(())
    }

    /// Horner evaluation at `t`; refuses |t| > radius.
    pub fn eval(&self, t: T) -> Result<T> {
        self.check_radius(t.to_f64())?;
        Ok(self.eval_unchecked(t))
    }

    pub fn eval_unchecked(&self, t: T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        acc
    }

    /// Derivative value at `t`.
    pub fn eval_deriv(&self, t: T) -> Result<T> {
        self.check_radius(t.to_f64())?;
        let mut acc = T::zero();
        for j in (1..self.coeffs.len()).rev() {
            acc = acc * t.clone() + self.coeffs[j].clone() * T::from_int(j as i64);
        }
        Ok(acc)
    }

    /// Term-by-term derivative as a series (same radius).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(T::zero(), self.radius);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, c)| c.clone() * T::from_int((k + 1) as i64))
            .collect();
        Self {
            coeffs,
            radius: self.radius,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|j| self.coeff(j) + other.coeff(j)).collect();
        Self {
            coeffs,
            radius: self.radius.min(other.radius),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|j| self.coeff(j) - other.coeff(j)).collect();
        Self {
            coeffs,
            radius: self.radius.min(other.radius),
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
            radius: self.radius,
        }
    }

    /// Cauchy product truncated at `order`.
    pub fn mul_truncated(&self, other: &Self, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > order {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self {
            coeffs,
            radius: self.radius.min(other.radius),
        }
    }

    /// Series reciprocal to the same truncation order; requires c_0 != 0.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let order = self.order();
        let mut coeffs = vec![T::zero(); order + 1];
        coeffs[0] = T::one() / self.coeffs[0].clone();
        for n in 1..=order {
            let mut acc = T::zero();
            for k in 1..=n {
                acc = acc + self.coeff(k) * coeffs[n - k].clone();
            }
            coeffs[n] = -(acc / self.coeffs[0].clone());
        }
        Ok(Self {
            coeffs,
            radius: self.radius,
        })
    }

    /// Multiply by t.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(T::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self {
            coeffs,
            radius: self.radius,
        }
    }

    /// Divide by t; requires a vanishing constant term (it is dropped).
    pub fn shift_down(&self) -> Self {
        let coeffs = if self.coeffs.len() > 1 {
            self.coeffs[1..].to_vec()
        } else {
            vec![T::zero()]
        };
        Self {
            coeffs,
            radius: self.radius,
        }
    }

    /// Ratio-test estimate |c_{j-1}/c_j| averaged over the trailing four
    /// coefficient pairs, floored at [`RADIUS_FLOOR`].
    pub fn estimate_radius(coeffs: &[T]) -> f64 {
        let n = coeffs.len();
        let mut ratios = Vec::new();
        for j in (1..n).rev().take(4) {
            let denom = coeffs[j].abs_f64();
            let numer = coeffs[j - 1].abs_f64();
            if denom > 0.0 && numer > 0.0 {
                ratios.push(numer / denom);
            }
        }
        if ratios.is_empty() {
            return 1.0;
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        mean.max(RADIUS_FLOOR)
    }

    pub fn to_f64(&self) -> TruncatedSeries<f64> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.to_f64()).collect(),
            radius: self.radius,
        }
    }
}

/// On-disk form: {"coeffs": [...], "order": N, "radius": r}.
#[derive(Debug, Serialize, Deserialize)]
struct SeriesJson {
    coeffs: Vec<f64>,
    order: usize,
    radius: f64,
}

impl TruncatedSeries<f64> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesJson {
            coeffs: self.coeffs.clone(),
            order: self.order(),
            radius: self.radius,
        })
        .expect("series serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SeriesJson = serde_json::from_str(text)?;
        if raw.coeffs.len() != raw.order + 1 {
            return Err(Error::CoefficientCount {
                len: raw.coeffs.len(),
                order: raw.order,
            });
        }
        Self::new(raw.coeffs, raw.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use approx::assert_relative_eq;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn geometric() -> TruncatedSeries<f64> {
        // 1/(1-t) truncated at order 6
        TruncatedSeries::new(vec![1.0; 7], 0.9).unwrap()
    }

    #[test]
    fn eval_matches_naive_sum() {
        let s = geometric();
        let t: f64 = 0.3;
        let naive: f64 = (0..7).map(|j| t.powi(j)).sum();
        assert_relative_eq!(s.eval(t).unwrap(), naive, epsilon = 1e-15);
    }

    #[test]
    fn eval_refused_outside_radius() {
        let s = geometric();
        assert!(matches!(s.eval(0.95), Err(Error::OutOfRadius { .. })));
        assert!(matches!(s.eval_deriv(-1.2), Err(Error::OutOfRadius { .. })));
    }

    #[test]
    fn derivative_matches_eval_deriv() {
        let s = TruncatedSeries::new(vec![2.0, -1.0, 0.5, 3.0], 1.0).unwrap();
        let d = s.derivative();
        for &t in &[0.0, 0.2, -0.7] {
            assert_relative_eq!(
                s.eval_deriv(t).unwrap(),
                d.eval(t).unwrap(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn reciprocal_of_rational_series_is_exact() {
        let s = TruncatedSeries::new(
            vec![
                Rational::ratio(3, 2),
                Rational::ratio(-9, 16),
                Rational::ratio(63, 128),
            ],
            1.0,
        )
        .unwrap();
        let r = s.reciprocal().unwrap();
        assert_eq!(r.coeff(0), Rational::ratio(2, 3));
        // product must be 1 through the truncation order
        let prod = s.mul_truncated(&r, 2);
        assert_eq!(prod.coeff(0), Rational::ratio(1, 1));
        assert!(prod.coeff(1).is_zero());
        assert!(prod.coeff(2).is_zero());
    }

    #[test]
    fn reciprocal_rejects_zero_constant() {
        let s = TruncatedSeries::new(vec![0.0, 1.0], 1.0).unwrap();
        assert!(matches!(s.reciprocal(), Err(Error::ZeroConstantTerm)));
    }

    #[test]
    fn radius_floor_applies() {
        // wildly growing coefficients -> tiny ratios -> floored
        let coeffs = vec![1.0, 1e6, 1e12, 1e18, 1e24, 1e30];
        assert_eq!(TruncatedSeries::estimate_radius(&coeffs), RADIUS_FLOOR);
    }

    #[test]
    fn json_round_trip_schema() {
        let s = TruncatedSeries::new(vec![1.0 / 3.0, -1.75, 0.40625], 1.1).unwrap();
        let text = s.to_json();
        assert!(text.contains("\"coeffs\""));
        assert!(text.contains("\"order\":2"));
        assert!(text.contains("\"radius\""));
        let back = TruncatedSeries::from_json(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_rejects_inconsistent_order() {
        let bad = r#"{"coeffs":[1.0,2.0],"order":5,"radius":1.0}"#;
        assert!(TruncatedSeries::from_json(bad).is_err());
    }

    proptest! {
        #[test]
        fn prop_reciprocal_product_is_one(
            c0 in 0.5f64..2.0,
            rest in proptest::collection::vec(-0.5f64..0.5, 1..8)
        ) {
            let mut coeffs = vec![c0];
            coeffs.extend(rest);
            let order = coeffs.len() - 1;
            let s = TruncatedSeries::new(coeffs, 1.0).unwrap();
            let r = s.reciprocal().unwrap();
            let prod = s.mul_truncated(&r, order);
            prop_assert!((prod.coeff(0) - 1.0).abs() < 1e-12);
            for j in 1..=order {
                prop_assert!(prod.coeff(j).abs() < 1e-10);
            }
        }

        #[test]
        fn prop_json_round_trip(
            coeffs in proptest::collection::vec(-1e3f64..1e3, 1..10),
            radius in 0.01f64..10.0
        ) {
            let s = TruncatedSeries::new(coeffs, radius).unwrap();
            let back = TruncatedSeries::from_json(&s.to_json()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
