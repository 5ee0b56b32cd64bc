//! Hodograph geometry: the rescaled polynomials
//!
//! ```text
//!   P3(x, phi) = (1+x) [ (1+x)^2 - b(phi) ]
//!   P2(x, phi) = 6 phi [ (1+x)^2 - a(phi) ]
//!   P6(x, phi) = P2 - P3^2
//! ```
//!
//! the open domain D = { P6 > 0 }, its characteristic boundary curve
//! phi = delta(x) with delta' = P3(x, delta), and the axis profile
//! phi(0, y) obtained by inverting the primitive Y(phi) of 1/sqrt(P6(0, .)).

use crate::error::{Error, Result};
use crate::numerics;
use crate::profiles::EulerProfiles;
use crate::scalar::Real;
use crate::series::TruncatedSeries;

/// Which rescaled polynomial to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyLabel {
    P2,
    P3,
    P6,
}

/// Fixed RK4 step count for pointwise (table-free) characteristic
/// integrations; keeps the integration error a smooth function of position.
const POINTWISE_STEPS: usize = 128;

/// Evaluator for the polynomial family and everything derived from it.
#[derive(Debug, Clone)]
pub struct Geometry {
    profiles: EulerProfiles,
    a_deriv: TruncatedSeries<Real>,
    b_deriv: TruncatedSeries<Real>,
    /// pi(t)/t where pi(t) = P6(0, t); positive near 0 (value 4 at t = 0).
    pi_ratio: TruncatedSeries<Real>,
}

impl Geometry {
    pub fn new(profiles: EulerProfiles) -> Self {
        let one = TruncatedSeries::constant(1.0, profiles.a().radius());
        let a_deriv = profiles.a().derivative();
        let b_deriv = profiles.b().derivative();
        // pi(t) = 6 t (1 - a(t)) - (1 - b(t))^2, and (1 - b) vanishes at 0,
        // so pi(t)/t = 6 (1 - a) - t * ((1 - b)/t)^2 is a regular series.
        let one_minus_b = one.sub(profiles.b());
        let bs = one_minus_b.shift_down();
        let bs2 = bs.mul_truncated(&bs, profiles.order());
        let pi_ratio = one.sub(profiles.a()).scale(6.0).sub(&bs2.shift_up());
        Self {
            profiles,
            a_deriv,
            b_deriv,
            pi_ratio,
        }
    }

    pub fn profiles(&self) -> &EulerProfiles {
        &self.profiles
    }

    /// Half-width of the resolved phi interval.
    pub fn eps_interval(&self) -> f64 {
        self.profiles.epsilon()
    }

    /// Negative-control copy with b(phi) shifted by `delta`.
    pub fn with_perturbed_b(&self, delta: f64) -> Self {
        let mut coeffs = self.profiles.b().coeffs().to_vec();
        coeffs[0] += delta;
        let b = TruncatedSeries::new(coeffs, self.profiles.b().radius())
            .expect("perturbed coefficients stay valid");
        let mut g = self.clone();
        g.b_deriv = b.derivative();
        g.profiles =
            EulerProfiles::from_parts(self.profiles.a().clone(), b, self.profiles.epsilon());
        g
    }

    fn check_phi(&self, phi: f64) -> Result<()> {
        if phi.abs() > self.eps_interval() {
            return Err(Error::OutOfRadius {
                t: phi,
                radius: self.eps_interval(),
            });
        }
        Ok(())
    }

    // -- pointwise values (callers guarantee |phi| <= eps) --------------

    pub fn p3(&self, x: f64, phi: f64) -> f64 {
        let r = 1.0 + x;
        r * (r * r - self.profiles.b().eval_unchecked(phi))
    }

    pub fn p2(&self, x: f64, phi: f64) -> f64 {
        let r = 1.0 + x;
        6.0 * phi * (r * r - self.profiles.a().eval_unchecked(phi))
    }

    pub fn p6(&self, x: f64, phi: f64) -> f64 {
        let p3 = self.p3(x, phi);
        self.p2(x, phi) - p3 * p3
    }

    pub fn dp3_dx(&self, x: f64, phi: f64) -> f64 {
        let r = 1.0 + x;
        3.0 * r * r - self.profiles.b().eval_unchecked(phi)
    }

    pub fn dp3_dphi(&self, x: f64, phi: f64) -> f64 {
        -(1.0 + x) * self.b_deriv.eval_unchecked(phi)
    }

    pub fn dp6_dx(&self, x: f64, phi: f64) -> f64 {
        12.0 * phi * (1.0 + x) - 2.0 * self.p3(x, phi) * self.dp3_dx(x, phi)
    }

    pub fn dp6_dphi(&self, x: f64, phi: f64) -> f64 {
        let r = 1.0 + x;
        6.0 * (r * r - self.profiles.a().eval_unchecked(phi))
            - 6.0 * phi * self.a_deriv.eval_unchecked(phi)
            - 2.0 * self.p3(x, phi) * self.dp3_dphi(x, phi)
    }

    /// Domain-checked evaluation of P2/P3/P6.
    pub fn eval_p(&self, label: PolyLabel, x: f64, phi: f64) -> Result<f64> {
        self.check_phi(phi)?;
        Ok(match label {
            PolyLabel::P2 => self.p2(x, phi),
            PolyLabel::P3 => self.p3(x, phi),
            PolyLabel::P6 => self.p6(x, phi),
        })
    }

    /// Max-abs of dP6/dx + P3 dP6/dphi - 2 (dP3/dphi) P6 over the lattice,
    /// using exact series differentiation.
    pub fn compatibility_residual(&self, xs: &[f64], phis: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &phi in phis {
            self.check_phi(phi)?;
            for &x in xs {
                let r = self.dp6_dx(x, phi) + self.p3(x, phi) * self.dp6_dphi(x, phi)
                    - 2.0 * self.dp3_dphi(x, phi) * self.p6(x, phi);
                worst = worst.max(r.abs());
            }
        }
        Ok(worst)
    }

    /// True iff (x, phi) lies in D = { P6 > 0 }.
    pub fn in_domain(&self, x: f64, phi: f64) -> Result<bool> {
        self.check_phi(phi)?;
        Ok(self.p6(x, phi) > 0.0)
    }

    // -- characteristic boundary curve ----------------------------------

    /// Integrate delta' = P3(x, delta), delta(0) = 0 to both sides of 0 with
    /// an explicit 4th-order stepper. `step` must resolve `half_width`
    /// (step <= half_width / 50).
    pub fn boundary_delta(&self, half_width: f64, step: f64) -> Result<BoundaryCurve> {
        if !(step > 0.0) || step > half_width / 50.0 {
            return Err(Error::Config(format!(
                "boundary step {step} must be positive and at most {}",
                half_width / 50.0
            )));
        }
        let n = (half_width / step).ceil() as usize;
        let h = half_width / n as f64;
        let eps = self.eps_interval();
        let f = |x: f64, d: f64| self.p3(x, d);

        let mut xs = Vec::with_capacity(2 * n + 1);
        let mut deltas = vec![0.0; 2 * n + 1];
        for i in 0..=2 * n {
            xs.push(-half_width + h * i as f64);
        }
        // outward marches from the center node
        for dir in [-1.0_f64, 1.0] {
            let mut d = 0.0;
            for k in 0..n {
                let x0 = dir * h * k as f64;
                let x1 = dir * h * (k + 1) as f64;
                d = numerics::rk4(&f, x0, d, x1, 4);
                if d.abs() > eps {
                    return Err(Error::DomainExit {
                        x: x1,
                        y: 0.0,
                        phi: d,
                        eps,
                    });
                }
                let idx = (n as i64 + dir as i64 * (k as i64 + 1)) as usize;
                deltas[idx] = d;
            }
        }
        let derivs: Vec<f64> = xs
            .iter()
            .zip(&deltas)
            .map(|(&x, &d)| self.p3(x, d))
            .collect();
        let max_abs_p6 = xs
            .iter()
            .zip(&deltas)
            .map(|(&x, &d)| self.p6(x, d).abs())
            .fold(0.0_f64, f64::max);
        Ok(BoundaryCurve {
            xs,
            deltas,
            derivs,
            max_abs_p6,
        })
    }

    /// Pointwise delta(x) by a fixed-step characteristic integration.
    pub fn delta_at(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(0.0);
        }
        let f = |t: f64, d: f64| self.p3(t, d);
        let d = numerics::rk4(&f, 0.0, 0.0, x, POINTWISE_STEPS);
        if d.abs() > self.eps_interval() {
            return Err(Error::DomainExit {
                x,
                y: 0.0,
                phi: d,
                eps: self.eps_interval(),
            });
        }
        Ok(d)
    }

    /// Pointwise stream value phi(x, y): axis inversion at (0, |y|) followed
    /// by a fixed-step characteristic march along the row. Table-free, used
    /// by samplers that need smooth point evaluations.
    pub fn phi_at(&self, x: f64, y: f64) -> Result<f64> {
        let phi0 = if y == 0.0 {
            return self.delta_at(x);
        } else {
            self.phi_axis(y.abs())?
        };
        if x == 0.0 {
            return Ok(phi0);
        }
        let f = |t: f64, p: f64| self.p3(t, p);
        let phi = numerics::rk4(&f, 0.0, phi0, x, POINTWISE_STEPS);
        if phi.abs() > self.eps_interval() {
            return Err(Error::DomainExit {
                x,
                y,
                phi,
                eps: self.eps_interval(),
            });
        }
        Ok(phi)
    }

    // -- axis profile ----------------------------------------------------

    /// pi(phi) = P6(0, phi).
    pub fn pi(&self, phi: f64) -> f64 {
        phi * self.pi_ratio.eval_unchecked(phi)
    }

    /// Y(phi) = integral_0^phi dt / sqrt(pi(t)), regularized by t = u^2:
    /// the integrand becomes 2 / sqrt(pi(u^2)/u^2), smooth through u = 0.
    pub fn y_of_phi(&self, phi: f64) -> Result<f64> {
        if phi == 0.0 {
            return Ok(0.0);
        }
        self.check_phi(phi)?;
        let mut bad: Option<(f64, f64)> = None;
        let val = numerics::integrate(
            |u| {
                let ratio = self.pi_ratio.eval_unchecked(u * u);
                if ratio <= 0.0 {
                    bad = Some((u * u, ratio));
                    return 0.0;
                }
                2.0 / ratio.sqrt()
            },
            0.0,
            phi.sqrt(),
        );
        if let Some((t, ratio)) = bad {
            return Err(Error::NonMonotoneY {
                phi: t,
                value: t * ratio,
            });
        }
        Ok(val)
    }

    /// Invert Y: the positive axis value phi(0, y) for y >= 0, chosen as the
    /// nontrivial branch of the degenerate axis ODE.
    pub fn phi_axis(&self, y: f64) -> Result<f64> {
        let y = y.abs();
        if y == 0.0 {
            return Ok(0.0);
        }
        let eps = self.eps_interval();
        let y_max = self.y_of_phi(eps)?;
        if y > y_max {
            return Err(Error::AxisRangeExceeded { y, y_max, eps });
        }
        let f = |phi: f64| self.y_of_phi(phi).unwrap_or(f64::INFINITY) - y;
        let df = |phi: f64| {
            let p = self.pi(phi);
            if p > 0.0 {
                1.0 / p.sqrt()
            } else {
                f64::INFINITY
            }
        };
        Ok(numerics::bisect_newton(f, df, 0.0, eps, 1e-13).clamp(0.0, eps))
    }

    /// Monotone table of the axis profile phi(0, y) on [0, y_max].
    pub fn axis_profile(&self, y_max: f64, n_points: usize) -> Result<AxisProfile> {
        let ys = numerics::linspace(0.0, y_max, n_points.max(2));
        let mut phis = Vec::with_capacity(ys.len());
        for &y in &ys {
            phis.push(self.phi_axis(y)?);
        }
        Ok(AxisProfile { ys, phis })
    }
}

/// The boundary curve phi = delta(x) on a uniform grid, with the exact slope
/// P3(x, delta) stored for cubic Hermite evaluation.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub xs: Vec<f64>,
    pub deltas: Vec<f64>,
    pub derivs: Vec<f64>,
    /// max |P6(x, delta(x))| along the integrated curve; the boundary is
    /// characteristic so this measures stepper drift.
    pub max_abs_p6: f64,
}

impl BoundaryCurve {
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.deltas[0];
        }
        if x >= self.xs[n - 1] {
            return self.deltas[n - 1];
        }
        let h = self.xs[1] - self.xs[0];
        let i = (((x - self.xs[0]) / h).floor() as usize).min(n - 2);
        let t = (x - self.xs[i]) / h;
        let (f0, f1) = (self.deltas[i], self.deltas[i + 1]);
        let (d0, d1) = (self.derivs[i] * h, self.derivs[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        f0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + t)
            + f1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    }

    /// Centered second difference at x = 0.
    pub fn second_difference_at_zero(&self, h: f64) -> f64 {
        (self.eval(h) - 2.0 * self.eval(0.0) + self.eval(-h)) / (h * h)
    }
}

/// Tabulated axis profile phi(0, y), y >= 0.
#[derive(Debug, Clone)]
pub struct AxisProfile {
    pub ys: Vec<f64>,
    pub phis: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{solve_profiles, DEFAULT_ORDER};
    use approx::assert_relative_eq;

    fn geometry() -> Geometry {
        Geometry::new(solve_profiles::<f64>(DEFAULT_ORDER).unwrap())
    }

    #[test]
    fn polynomial_values_at_origin() {
        let g = geometry();
        assert_eq!(g.eval_p(PolyLabel::P3, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(g.eval_p(PolyLabel::P6, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(g.eval_p(PolyLabel::P2, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn p6_phi_derivative_at_origin_is_four() {
        let g = geometry();
        assert_relative_eq!(g.dp6_dphi(0.0, 0.0), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn p6_consistency_with_p2_p3() {
        let g = geometry();
        for &x in &[-0.02, 0.0, 0.013] {
            for &phi in &[0.001, 0.02, 0.04] {
                let direct = g.p6(x, phi);
                let composed = g.p2(x, phi) - g.p3(x, phi).powi(2);
                assert_relative_eq!(direct, composed, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eval_rejects_phi_outside_interval() {
        let g = geometry();
        assert!(g.eval_p(PolyLabel::P3, 0.0, 0.2).is_err());
        assert!(g.in_domain(0.0, -0.9).is_err());
    }

    #[test]
    fn compatibility_residual_small_and_decaying() {
        let mut last = f64::INFINITY;
        for order in [4, 8, 12] {
            let g = Geometry::new(solve_profiles::<f64>(order).unwrap());
            let eps = g.eps_interval();
            let xs = numerics::linspace(-eps / 2.0, eps / 2.0, 21);
            let res = g.compatibility_residual(&xs, &xs).unwrap();
            assert!(res < last, "order {order}: {res} !< {last}");
            last = res;
        }
        assert!(last <= 1e-9, "residual at order 12: {last}");
    }

    #[test]
    fn compatibility_zero_at_origin() {
        let g = geometry();
        let res = g.compatibility_residual(&[0.0], &[0.0]).unwrap();
        assert!(res < 1e-15);
    }

    #[test]
    fn perturbed_b_breaks_compatibility() {
        let g = geometry().with_perturbed_b(1e-3);
        let xs = numerics::linspace(-0.025, 0.025, 21);
        let res = g.compatibility_residual(&xs, &xs).unwrap();
        assert!(res >= 1e-4, "perturbation residual {res}");
    }

    #[test]
    fn boundary_curve_basics() {
        let g = geometry();
        let curve = g.boundary_delta(0.05, 1e-3).unwrap();
        let mid = curve.xs.len() / 2;
        assert_eq!(curve.deltas[mid], 0.0);
        assert!(curve.deltas.iter().all(|&d| d >= 0.0));
        assert!(curve.max_abs_p6 <= 1e-8, "P6 drift {}", curve.max_abs_p6);
        // strict local minimum: second difference -> 2
        for h in [1e-2, 5e-3, 2.5e-3] {
            let dd = curve.second_difference_at_zero(h);
            assert!((dd - 2.0).abs() <= 5.0 * h * h, "h={h}: {dd}");
        }
    }

    #[test]
    fn boundary_curve_even_to_cubic_order() {
        let g = geometry();
        let curve = g.boundary_delta(0.04, 5e-4).unwrap();
        for &x in &[5e-3, 1e-2, 2e-2] {
            let asym = (curve.eval(x) - curve.eval(-x)).abs();
            assert!(asym <= 4.0 * x.powi(3), "x={x}: asym {asym}");
        }
    }

    #[test]
    fn boundary_integral_identity() {
        // delta(x) = integral_0^x P3(xi, delta(xi)) d xi
        let g = geometry();
        let curve = g.boundary_delta(0.04, 2e-4).unwrap();
        let h = curve.xs[1] - curve.xs[0];
        let mid = curve.xs.len() / 2;
        let rhs = numerics::cumulative_integral(&curve.derivs[mid..], h);
        for (k, &r) in rhs.iter().enumerate() {
            assert!(
                (curve.deltas[mid + k] - r).abs() < 1e-10,
                "node {k}: {} vs {r}",
                curve.deltas[mid + k]
            );
        }
    }

    #[test]
    fn boundary_step_validated() {
        let g = geometry();
        assert!(g.boundary_delta(0.05, 0.5).is_err());
    }

    #[test]
    fn axis_profile_basics() {
        let g = geometry();
        let prof = g.axis_profile(0.1, 41).unwrap();
        assert_eq!(prof.phis[0], 0.0);
        // monotone
        for w in prof.phis.windows(2) {
            assert!(w[1] > w[0]);
        }
        // phi(0, y) / y^2 -> 1
        for (&y, &phi) in prof.ys.iter().zip(&prof.phis).skip(1).take(5) {
            assert_relative_eq!(phi / (y * y), 1.0, max_relative = 0.1);
        }
        // dphi/dy = sqrt(pi(phi)) at interior nodes (centered difference)
        let h = prof.ys[1] - prof.ys[0];
        for j in 1..prof.ys.len() - 1 {
            let fd = (prof.phis[j + 1] - prof.phis[j - 1]) / (2.0 * h);
            let exact = g.pi(prof.phis[j]).sqrt();
            assert_relative_eq!(fd, exact, max_relative = 5e-3);
        }
    }

    #[test]
    fn axis_inverse_matches_forward_map() {
        let g = geometry();
        for &phi in &[1e-4, 1e-3, 0.01, 0.04] {
            let y = g.y_of_phi(phi).unwrap();
            let back = g.phi_axis(y).unwrap();
            assert_relative_eq!(back, phi, max_relative = 1e-10);
        }
    }

    #[test]
    fn axis_slope_blows_up_at_zero() {
        // Y'(0) infinite: the increment of y per unit phi grows without bound
        // near 0, i.e. dphi/dy -> 0.
        let g = geometry();
        let prof = g.axis_profile(0.08, 81).unwrap();
        let first = prof.phis[1] - prof.phis[0];
        let later = prof.phis[40] - prof.phis[39];
        assert!(first < 0.2 * later, "first {first}, later {later}");
    }

    #[test]
    fn axis_range_guarded() {
        let g = geometry();
        assert!(matches!(
            g.phi_axis(10.0),
            Err(Error::AxisRangeExceeded { .. })
        ));
    }

    #[test]
    fn domain_membership() {
        let g = geometry();
        let eps = g.eps_interval();
        // (0, 0) is a boundary point
        assert!(!g.in_domain(0.0, 0.0).unwrap());
        // the axis above the origin is inside
        assert!(g.in_domain(0.0, eps / 2.0).unwrap());
        // just below the boundary curve is outside
        let curve = g.boundary_delta(0.04, 5e-4).unwrap();
        for &x in &[0.01, -0.015] {
            let d = curve.eval(x);
            assert!(!g.in_domain(x, d - 1e-6).unwrap(), "x = {x}");
            assert!(g.in_domain(x, d + 1e-4).unwrap(), "x = {x}");
        }
    }

    #[test]
    fn boundary_sign_change_within_one_cell() {
        // implicit-function consistency: P6(x, .) changes sign at delta(x)
        let g = geometry();
        let curve = g.boundary_delta(0.03, 5e-4).unwrap();
        let dphi = 1e-5;
        for (k, &x) in curve.xs.iter().enumerate().step_by(7) {
            let d = curve.deltas[k];
            let lo = g.p6(x, d - dphi);
            let hi = g.p6(x, d + dphi);
            assert!(lo < 0.0 && hi > 0.0, "x={x}: P6 {lo}, {hi}");
        }
    }

    #[test]
    fn delta_pointwise_matches_table() {
        let g = geometry();
        let curve = g.boundary_delta(0.04, 1e-4).unwrap();
        for &x in &[-0.03, -0.01, 0.005, 0.035] {
            assert_relative_eq!(g.delta_at(x).unwrap(), curve.eval(x), epsilon = 1e-12);
        }
    }
}
