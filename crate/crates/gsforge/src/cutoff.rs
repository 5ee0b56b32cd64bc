//! Smooth compactly supported cutoff profiles in the pressure variable.
//!
//! A bump profile is identically zero for p <= p_lo and p >= p_hi, equals one
//! on an inner plateau, and transitions through the standard exp(-1/t) C-inf
//! ramp. Rebuilt pressures need the antiderivative of a power of the profile:
//! the steady-flow cutoffs use grad(p~) = phi_c^2 grad(p) (Euler, Boussinesq)
//! or grad(p~) = phi_c grad(p) (porous medium), so both powers are exposed.

use crate::error::{Error, Result};
use crate::numerics;

/// Exp-based smoothstep: 0 for t <= 0, 1 for t >= 1, C-infinity.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let ea = (-1.0 / t).exp();
    let eb = (-1.0 / (1.0 - t)).exp();
    ea / (ea + eb)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    /// phi_c = 1 everywhere (no localization; pressure shifts by a constant).
    Identity,
    /// Supported on [p_lo, p_hi] with ramp width `ramp` on each side.
    Bump { p_lo: f64, p_hi: f64, ramp: f64 },
}

/// Smooth pressure cutoff with antiderivative access.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffSpec {
    profile: Profile,
    /// Cumulative integrals of phi_c and phi_c^2 over the support panels.
    tables: Option<CutoffTables>,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct CutoffTables {
    panel_edges: Vec<f64>,
    cumulative_1: Vec<f64>,
    cumulative_2: Vec<f64>,
}

const PANELS: usize = 96;

impl CutoffSpec {
    pub fn identity() -> Self {
        Self {
            profile: Profile::Identity,
            tables: None,
        }
    }

    /// Bump supported on [p_lo, p_hi]; `ramp_fraction` of the window width is
    /// spent on each transition (at most 1/2).
    pub fn bump(p_lo: f64, p_hi: f64, ramp_fraction: f64) -> Result<Self> {
        if !(p_lo.is_finite() && p_hi.is_finite()) || p_lo >= p_hi {
            return Err(Error::ThresholdsOutOfRange {
                p_lo,
                p_hi,
                attained_lo: f64::NAN,
                attained_hi: f64::NAN,
            });
        }
        if !(ramp_fraction > 0.0 && ramp_fraction <= 0.5) {
            return Err(Error::Config(format!(
                "ramp fraction {ramp_fraction} outside (0, 1/2]"
            )));
        }
        let ramp = ramp_fraction * (p_hi - p_lo);
        let mut spec = Self {
            profile: Profile::Bump { p_lo, p_hi, ramp },
            tables: None,
        };
        spec.tables = Some(spec.build_tables());
        Ok(spec)
    }

    pub fn thresholds(&self) -> Option<(f64, f64)> {
        match self.profile {
            Profile::Identity => None,
            Profile::Bump { p_lo, p_hi, .. } => Some((p_lo, p_hi)),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.profile, Profile::Identity)
    }

    /// Profile value phi_c(p) in [0, 1]; exact zeros outside the support.
    pub fn value(&self, p: f64) -> f64 {
        match self.profile {
            Profile::Identity => 1.0,
            Profile::Bump { p_lo, p_hi, ramp } => {
                if p <= p_lo || p >= p_hi {
                    return 0.0;
                }
                smoothstep((p - p_lo) / ramp) * smoothstep((p_hi - p) / ramp)
            }
        }
    }

    fn build_tables(&self) -> CutoffTables {
        let (p_lo, p_hi) = self.thresholds().expect("bump profile");
        let edges = numerics::linspace(p_lo, p_hi, PANELS + 1);
        let mut c1 = vec![0.0; PANELS + 1];
        let mut c2 = vec![0.0; PANELS + 1];
        for k in 0..PANELS {
            c1[k + 1] = c1[k] + numerics::integrate(|s| self.value(s), edges[k], edges[k + 1]);
            c2[k + 1] = c2[k]
                + numerics::integrate(
                    |s| {
                        let v = self.value(s);
                        v * v
                    },
                    edges[k],
                    edges[k + 1],
                );
        }
        CutoffTables {
            panel_edges: edges,
            cumulative_1: c1,
            cumulative_2: c2,
        }
    }

    /// Antiderivative of phi_c^power (power 1 or 2), vanishing at p_lo.
    /// Constant below the support, affine-free (constant) above it.
    pub fn antiderivative(&self, p: f64, power: u32) -> f64 {
        assert!(power == 1 || power == 2, "only powers 1 and 2 are used");
        match self.profile {
            Profile::Identity => p,
            Profile::Bump { p_lo, p_hi, .. } => {
                let tables = self.tables.as_ref().expect("bump tables built");
                let cum = if power == 1 {
                    &tables.cumulative_1
                } else {
                    &tables.cumulative_2
                };
                if p <= p_lo {
                    return 0.0;
                }
                if p >= p_hi {
                    return cum[PANELS];
                }
                let w = (p_hi - p_lo) / PANELS as f64;
                let k = (((p - p_lo) / w).floor() as usize).min(PANELS - 1);
                let partial = numerics::integrate(
                    |s| {
                        let v = self.value(s);
                        if power == 1 {
                            v
                        } else {
                            v * v
                        }
                    },
                    tables.panel_edges[k],
                    p,
                );
                cum[k] + partial
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smoothstep_saturates() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert!(smoothstep(0.5) > 0.49 && smoothstep(0.5) < 0.51);
        // monotone on the ramp
        let mut last = 0.0;
        for k in 0..=100 {
            let v = smoothstep(k as f64 / 100.0);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn bump_support_is_exact() {
        let c = CutoffSpec::bump(1.0, 3.0, 0.25).unwrap();
        assert_eq!(c.value(0.5), 0.0);
        assert_eq!(c.value(1.0), 0.0);
        assert_eq!(c.value(3.0), 0.0);
        assert_eq!(c.value(10.0), 0.0);
        // plateau
        assert_eq!(c.value(2.0), 1.0);
        // ramps strictly inside (0, 1)
        for &p in &[1.2, 1.4, 2.6, 2.9] {
            let v = c.value(p);
            assert!(v > 0.0 && v < 1.0, "value({p}) = {v}");
        }
    }

    #[test]
    fn bump_rejects_bad_thresholds() {
        assert!(CutoffSpec::bump(2.0, 1.0, 0.2).is_err());
        assert!(CutoffSpec::bump(1.0, 3.0, 0.7).is_err());
    }

    #[test]
    fn antiderivative_consistent_with_value_by_differentiation() {
        let c = CutoffSpec::bump(0.5, 1.5, 0.3).unwrap();
        let h = 1e-6;
        for power in [1u32, 2] {
            for &p in &[0.55, 0.8, 1.0, 1.2, 1.45] {
                let fd =
                    (c.antiderivative(p + h, power) - c.antiderivative(p - h, power)) / (2.0 * h);
                let v = c.value(p);
                let exact = if power == 1 { v } else { v * v };
                assert_relative_eq!(fd, exact, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn antiderivative_flat_outside_support() {
        let c = CutoffSpec::bump(0.5, 1.5, 0.3).unwrap();
        assert_eq!(c.antiderivative(0.2, 2), 0.0);
        let top = c.antiderivative(1.5, 2);
        assert_eq!(c.antiderivative(7.0, 2), top);
        assert!(top > 0.0 && top < 1.0);
    }

    #[test]
    fn identity_profile() {
        let c = CutoffSpec::identity();
        assert_eq!(c.value(-3.0), 1.0);
        assert_eq!(c.antiderivative(0.7, 2), 0.7);
    }
}
