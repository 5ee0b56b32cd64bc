//! Analytic profile functions a(phi), b(phi).
//!
//! The pair solves the singular ODE system
//!
//! ```text
//!   a' = 2/(a-b) + (b-3a)/(3 phi),   a(0) = 1/3,
//!   b' = 1/(a-b),                    b(0) = 1,
//! ```
//!
//! obtained here through the regular recurrence for z = b - 3a and
//! zeta = 1/(b - a):
//!
//! ```text
//!   z_j = 5 zeta_{j-1} / (j+1),
//!   j zeta_j = (1/3) (z zeta^2)_j - (zeta^3)_{j-1},    zeta_0 = 3/2.
//! ```
//!
//! The recurrence is exact in rational arithmetic; the default pipeline runs
//! it in f64.

use crate::error::{Error, Result};
use crate::scalar::Coeff;
use crate::series::TruncatedSeries;

/// Default truncation order: residual below 1e-10 on |phi| <= 0.05.
pub const DEFAULT_ORDER: usize = 12;

/// Cap on the interval half-width; the series radius may allow more but the
/// geometry never uses it.
pub const EPSILON_CAP: f64 = 0.05;

/// Solve the coupled recurrence up to truncation order `order` (>= 2).
pub fn solve_z_zeta<T: Coeff>(order: usize) -> Result<(TruncatedSeries<T>, TruncatedSeries<T>)> {
    if order < 2 {
        return Err(Error::OrderTooSmall { min: 2, got: order });
    }
    let third = T::ratio(1, 3);
    let mut z = vec![T::zero(); order + 1];
    let mut zeta = vec![T::zero(); order + 1];
    zeta[0] = T::ratio(3, 2);
    // (zeta^2)_n, extended as zeta_n becomes available
    let mut zeta2 = vec![T::zero(); order + 1];
    zeta2[0] = zeta[0].clone() * zeta[0].clone();

    for j in 1..=order {
        z[j] = T::from_int(5) * zeta[j - 1].clone() / T::from_int((j + 1) as i64);
        // (z zeta^2)_j uses z_1..z_j and (zeta^2)_0..(zeta^2)_{j-1}
        let mut z_zeta2 = T::zero();
        for k in 1..=j {
            z_zeta2 = z_zeta2 + z[k].clone() * zeta2[j - k].clone();
        }
        // (zeta^3)_{j-1} uses (zeta^2)_0..(zeta^2)_{j-1} and zeta_0..zeta_{j-1}
        let mut zeta3 = T::zero();
        for i in 0..j {
            zeta3 = zeta3 + zeta2[i].clone() * zeta[j - 1 - i].clone();
        }
        zeta[j] = (third.clone() * z_zeta2 - zeta3) / T::from_int(j as i64);
        // extend (zeta^2) to index j
        let mut sq = T::zero();
        for i in 0..=j {
            sq = sq + zeta[i].clone() * zeta[j - i].clone();
        }
        zeta2[j] = sq;
    }

    let radius = TruncatedSeries::estimate_radius(&zeta);
    Ok((
        TruncatedSeries::new(z, radius)?,
        TruncatedSeries::new(zeta, radius)?,
    ))
}

/// Max-abs defect of a (z, zeta) pair against the recurrence, in f64.
/// Zero (exactly) for coefficients produced in rational arithmetic.
pub fn recurrence_residual<T: Coeff>(
    z: &TruncatedSeries<T>,
    zeta: &TruncatedSeries<T>,
) -> f64 {
    let order = z.order().min(zeta.order());
    let zeta2: Vec<T> = (0..=order)
        .map(|n| {
            let mut acc = T::zero();
            for i in 0..=n {
                acc = acc + zeta.coeff(i) * zeta.coeff(n - i);
            }
            acc
        })
        .collect();
    let mut worst: f64 = z.coeff(0).abs_f64();
    for j in 1..=order {
        let r1 = z.coeff(j) * T::from_int((j + 1) as i64) - T::from_int(5) * zeta.coeff(j - 1);
        let mut z_zeta2 = T::zero();
        for k in 1..=j {
            z_zeta2 = z_zeta2 + z.coeff(k) * zeta2[j - k].clone();
        }
        let mut zeta3 = T::zero();
        for i in 0..j {
            zeta3 = zeta3 + zeta2[i].clone() * zeta.coeff(j - 1 - i);
        }
        let r2 = T::from_int(j as i64) * zeta.coeff(j) - (T::ratio(1, 3) * z_zeta2 - zeta3);
        worst = worst.max(r1.abs_f64()).max(r2.abs_f64());
    }
    worst
}

/// The profile pair a(phi), b(phi) on the interval |phi| <= epsilon.
#[derive(Debug, Clone)]
pub struct Profiles<T: Coeff> {
    a: TruncatedSeries<T>,
    b: TruncatedSeries<T>,
    epsilon: f64,
}

/// Concrete profiles used by the geometry and field pipeline.
pub type EulerProfiles = Profiles<f64>;

impl<T: Coeff> Profiles<T> {
    /// Assemble from already-built series. No invariant checks; meant for
    /// perturbation controls and tests.
    pub fn from_parts(a: TruncatedSeries<T>, b: TruncatedSeries<T>, epsilon: f64) -> Self {
        Self { a, b, epsilon }
    }

    pub fn a(&self) -> &TruncatedSeries<T> {
        &self.a
    }

    pub fn b(&self) -> &TruncatedSeries<T> {
        &self.b
    }

    /// Half-width of the interval the geometry may use.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    pub fn to_f64(&self) -> Profiles<f64> {
        Profiles {
            a: self.a.to_f64(),
            b: self.b.to_f64(),
            epsilon: self.epsilon,
        }
    }
}

/// Recover a = (1/zeta - z)/2 and b = a + 1/zeta from the auxiliary series.
pub fn profiles_from_z_zeta<T: Coeff>(
    z: &TruncatedSeries<T>,
    zeta: &TruncatedSeries<T>,
) -> Result<Profiles<T>> {
    let recip = zeta.reciprocal()?;
    let a = recip.sub(z).scale(T::ratio(1, 2));
    let b = a.add(&recip);
    let radius = zeta.radius();
    let epsilon = (radius / 2.0).min(EPSILON_CAP);

    let profiles = Profiles { a, b, epsilon };
    // non-degeneracy of 1/(a - b) on the working interval
    let gap0 = (profiles.b.coeff(0) - profiles.a.coeff(0)).abs_f64();
    for k in 0..=64 {
        let phi = -epsilon + 2.0 * epsilon * k as f64 / 64.0;
        let a_v = eval_f64(&profiles.a, phi);
        let b_v = eval_f64(&profiles.b, phi);
        if b_v - a_v < 0.5 * gap0 {
            return Err(Error::DegenerateProfiles {
                phi,
                gap: b_v - a_v,
            });
        }
    }
    Ok(profiles)
}

fn eval_f64<T: Coeff>(s: &TruncatedSeries<T>, t: f64) -> f64 {
    let mut acc = 0.0;
    for c in s.coeffs().iter().rev() {
        acc = acc * t + c.to_f64();
    }
    acc
}

/// Convenience: run the recurrence and the reconstruction at `order`.
pub fn solve_profiles<T: Coeff>(order: usize) -> Result<Profiles<T>> {
    let (z, zeta) = solve_z_zeta::<T>(order)?;
    profiles_from_z_zeta(&z, &zeta)
}

impl Profiles<f64> {
    /// Max-abs residual of the two profile ODEs over `phi_samples`.
    ///
    /// The singular quotient (b - 3a)/(3 phi) is evaluated through its own
    /// series (the numerator has a vanishing constant term), which also gives
    /// the correct limit value at phi = 0.
    pub fn ode_residual(&self, phi_samples: &[f64]) -> Result<(f64, f64)> {
        let a_d = self.a.derivative();
        let b_d = self.b.derivative();
        let singular = self
            .b
            .sub(&self.a.scale(3.0))
            .shift_down()
            .scale(1.0 / 3.0);
        let gap0 = (self.b.coeff(0) - self.a.coeff(0)).abs();
        let mut res_a: f64 = 0.0;
        let mut res_b: f64 = 0.0;
        for &phi in phi_samples {
            let av = self.a.eval(phi)?;
            let bv = self.b.eval(phi)?;
            let gap = av - bv;
            if gap.abs() < 1e-6 * gap0 || gap.abs() < 1e-12 {
                return Err(Error::DegenerateProfiles {
                    phi,
                    gap: gap.abs(),
                });
            }
            let s = singular.eval(phi)?;
            res_a = res_a.max((a_d.eval(phi)? - 2.0 / gap - s).abs());
            res_b = res_b.max((b_d.eval(phi)? - 1.0 / gap).abs());
        }
        Ok((res_a, res_b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use approx::assert_relative_eq;
    use num_traits::Zero;

    #[test]
    fn rejects_small_order() {
        assert!(matches!(
            solve_z_zeta::<f64>(1),
            Err(Error::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn first_coefficients_exact_in_rational_mode() {
        let (z, zeta) = solve_z_zeta::<Rational>(6).unwrap();
        assert!(z.coeff(0).is_zero());
        assert_eq!(zeta.coeff(0), Rational::ratio(3, 2));
        assert_eq!(z.coeff(1), Rational::ratio(15, 4));
        assert_eq!(zeta.coeff(1), Rational::ratio(-9, 16));
        assert_eq!(z.coeff(2), Rational::ratio(-15, 16));
        assert_eq!(zeta.coeff(2), Rational::ratio(63, 128));
        assert_eq!(z.coeff(3), Rational::ratio(315, 512));
        assert_eq!(zeta.coeff(3), Rational::ratio(-1035, 2048));
    }

    #[test]
    fn first_coefficients_in_float_mode() {
        let (z, zeta) = solve_z_zeta::<f64>(6).unwrap();
        assert_eq!(z.coeff(1), 3.75);
        assert_eq!(zeta.coeff(1), -0.5625);
        assert_relative_eq!(z.coeff(2), -15.0 / 16.0, max_relative = 1e-15);
        assert_relative_eq!(zeta.coeff(2), 63.0 / 128.0, max_relative = 1e-15);
    }

    #[test]
    fn recurrence_residual_zero_in_rational_mode() {
        let (z, zeta) = solve_z_zeta::<Rational>(12).unwrap();
        assert_eq!(recurrence_residual(&z, &zeta), 0.0);
    }

    #[test]
    fn recurrence_residual_small_in_float_mode() {
        let (z, zeta) = solve_z_zeta::<f64>(12).unwrap();
        assert!(recurrence_residual(&z, &zeta) < 1e-12);
    }

    #[test]
    fn profile_data_exact() {
        let p = solve_profiles::<f64>(DEFAULT_ORDER).unwrap();
        assert_eq!(p.a().coeff(0), 1.0 / 3.0);
        assert_eq!(p.b().coeff(0), 1.0);
        assert_eq!(p.a().eval(0.0).unwrap(), 1.0 / 3.0);
        assert_eq!(p.b().eval(0.0).unwrap(), 1.0);
    }

    #[test]
    fn profile_derivatives_at_zero() {
        // a'(0) = -7/4 by the limit of the singular ODE term; b'(0) = 1/(a-b)(0)
        let p = solve_profiles::<f64>(DEFAULT_ORDER).unwrap();
        assert_relative_eq!(p.a().eval_deriv(0.0).unwrap(), -1.75, epsilon = 1e-14);
        assert_relative_eq!(p.b().eval_deriv(0.0).unwrap(), -1.5, epsilon = 1e-14);
        // rational cross-check: b' - 3a' = z_1 = 15/4
        let pr = solve_profiles::<Rational>(4).unwrap();
        assert_eq!(pr.a().coeff(1), Rational::ratio(-7, 4));
        assert_eq!(pr.b().coeff(1), Rational::ratio(-3, 2));
    }

    #[test]
    fn reconstruction_identities_hold_as_series() {
        let (z, zeta) = solve_z_zeta::<Rational>(10).unwrap();
        let p = profiles_from_z_zeta(&z, &zeta).unwrap();
        let recip = zeta.reciprocal().unwrap();
        // b - a = 1/zeta, b - 3a = z, exactly
        let b_minus_a = p.b().sub(p.a());
        let b_minus_3a = p.b().sub(&p.a().scale(Rational::from_int(3)));
        for j in 0..=10 {
            assert_eq!(b_minus_a.coeff(j), recip.coeff(j), "1/zeta at {j}");
            assert_eq!(b_minus_3a.coeff(j), z.coeff(j), "z at {j}");
        }
    }

    #[test]
    fn constant_input_reproduces_initial_data() {
        // z = 0, zeta = 3/2 -> a = 1/3, b = 1 identically
        let z = TruncatedSeries::new(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let zeta = TruncatedSeries::new(vec![1.5, 0.0, 0.0], 1.0).unwrap();
        let p = profiles_from_z_zeta(&z, &zeta).unwrap();
        for &phi in &[-0.04, 0.0, 0.03] {
            assert_relative_eq!(p.a().eval(phi).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
            assert_relative_eq!(p.b().eval(phi).unwrap(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zeta_with_zero_constant_rejected() {
        let z = TruncatedSeries::new(vec![0.0, 1.0], 1.0).unwrap();
        let zeta = TruncatedSeries::new(vec![0.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            profiles_from_z_zeta(&z, &zeta),
            Err(Error::ZeroConstantTerm)
        ));
    }

    #[test]
    fn singular_term_limit_at_zero() {
        // (b - 3a)/(3 phi) -> (b' - 3a')/3 = z_1/3 = 5/4
        let p = solve_profiles::<f64>(DEFAULT_ORDER).unwrap();
        let singular = p.b().sub(&p.a().scale(3.0)).shift_down().scale(1.0 / 3.0);
        assert_relative_eq!(singular.eval(0.0).unwrap(), 1.25, epsilon = 1e-14);
    }

    #[test]
    fn constant_truncation_has_order_one_residual() {
        let a = TruncatedSeries::new(vec![1.0 / 3.0], 1.0).unwrap();
        let b = TruncatedSeries::new(vec![1.0], 1.0).unwrap();
        let p = Profiles {
            a,
            b,
            epsilon: 0.05,
        };
        let (ra, rb) = p.ode_residual(&[0.01, 0.02, 0.04]).unwrap();
        assert!(ra > 0.5, "res_a {ra}");
        assert!(rb > 0.5, "res_b {rb}");
    }

    #[test]
    fn residual_decays_geometrically_with_order() {
        let samples: Vec<f64> = (0..=20).map(|k| -0.025 + 0.0025 * k as f64).collect();
        let mut last = f64::INFINITY;
        for order in [4, 6, 8, 10, 12] {
            let p = solve_profiles::<f64>(order).unwrap();
            let (ra, rb) = p.ode_residual(&samples).unwrap();
            let res = ra.max(rb);
            assert!(
                res < 0.5 * last || res < 1e-14,
                "order {order}: {res} vs {last}"
            );
            last = res;
        }
        // N = 8 on |phi| <= eps/2 is comfortably below 1e-8
        let p8 = solve_profiles::<f64>(8).unwrap();
        let (ra, rb) = p8.ode_residual(&samples).unwrap();
        assert!(ra.max(rb) <= 1e-8);
    }

    #[test]
    fn degenerate_profiles_flagged() {
        let a = TruncatedSeries::new(vec![1.0, 0.0], 1.0).unwrap();
        let b = TruncatedSeries::new(vec![1.0, 0.0], 1.0).unwrap();
        let p = Profiles {
            a,
            b,
            epsilon: 0.05,
        };
        assert!(matches!(
            p.ode_residual(&[0.01]),
            Err(Error::DegenerateProfiles { .. })
        ));
    }
}
