//! Finite-difference verification engine.
//!
//! Everything here is construction-agnostic: fields come in as grid samples
//! and residuals of the governing equations are assembled with second-order
//! stencils (centered inside, one-sided on boundary rows, which are reported
//! separately). Convergence orders come from least-squares fits of
//! log(residual) against log(h) across refinements.

use crate::error::{Error, Result};
use crate::euler::EulerField;
use crate::grid::GridField;
use crate::numerics;
use serde::{Deserialize, Serialize};

/// One verified equation: spacing, residual norms, observed order and the
/// pass/fail verdict against a tolerance (when one applies).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: String,
    pub h: f64,
    pub max_res: f64,
    pub l2_res: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotone: Option<bool>,
}

impl ResidualReport {
    pub fn single(equation: &str, h: f64, max_res: f64, l2_res: f64) -> Self {
        Self {
            equation: equation.to_string(),
            h,
            max_res,
            l2_res,
            order: None,
            pass: None,
            monotone: None,
        }
    }
}

/// Max and mean-square residual over the included interior nodes, with the
/// boundary rows tracked separately.
#[derive(Debug, Clone, Copy, Default)]
pub struct SampledResidual {
    pub max: f64,
    pub l2: f64,
    pub boundary_max: f64,
}

struct Accumulator {
    max: f64,
    sum_sq: f64,
    count: usize,
    boundary_max: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            max: 0.0,
            sum_sq: 0.0,
            count: 0,
            boundary_max: 0.0,
        }
    }

    fn push(&mut self, value: f64, boundary: bool) {
        if boundary {
            self.boundary_max = self.boundary_max.max(value.abs());
        } else {
            self.max = self.max.max(value.abs());
            self.sum_sq += value * value;
            self.count += 1;
        }
    }

    fn finish(self) -> SampledResidual {
        SampledResidual {
            max: self.max,
            l2: if self.count > 0 {
                (self.sum_sq / self.count as f64).sqrt()
            } else {
                0.0
            },
            boundary_max: self.boundary_max,
        }
    }
}

// -- stencils ------------------------------------------------------------

fn d_dx(f: &GridField, i: usize, j: usize) -> f64 {
    let g = &f.grid;
    let h = g.hx();
    if i == 0 {
        (-3.0 * f.get(0, j) + 4.0 * f.get(1, j) - f.get(2, j)) / (2.0 * h)
    } else if i == g.nx - 1 {
        (3.0 * f.get(i, j) - 4.0 * f.get(i - 1, j) + f.get(i - 2, j)) / (2.0 * h)
    } else {
        (f.get(i + 1, j) - f.get(i - 1, j)) / (2.0 * h)
    }
}

fn d_dy(f: &GridField, i: usize, j: usize) -> f64 {
    let g = &f.grid;
    let h = g.hy();
    if j == 0 {
        (-3.0 * f.get(i, 0) + 4.0 * f.get(i, 1) - f.get(i, 2)) / (2.0 * h)
    } else if j == g.ny - 1 {
        (3.0 * f.get(i, j) - 4.0 * f.get(i, j - 1) + f.get(i, j - 2)) / (2.0 * h)
    } else {
        (f.get(i, j + 1) - f.get(i, j - 1)) / (2.0 * h)
    }
}

fn d2_dx2(f: &GridField, i: usize, j: usize) -> f64 {
    let g = &f.grid;
    let h2 = g.hx() * g.hx();
    if i == 0 {
        (2.0 * f.get(0, j) - 5.0 * f.get(1, j) + 4.0 * f.get(2, j) - f.get(3, j)) / h2
    } else if i == g.nx - 1 {
        (2.0 * f.get(i, j) - 5.0 * f.get(i - 1, j) + 4.0 * f.get(i - 2, j) - f.get(i - 3, j)) / h2
    } else {
        (f.get(i + 1, j) - 2.0 * f.get(i, j) + f.get(i - 1, j)) / h2
    }
}

fn d2_dy2(f: &GridField, i: usize, j: usize) -> f64 {
    let g = &f.grid;
    let h2 = g.hy() * g.hy();
    if j == 0 {
        (2.0 * f.get(i, 0) - 5.0 * f.get(i, 1) + 4.0 * f.get(i, 2) - f.get(i, 3)) / h2
    } else if j == g.ny - 1 {
        (2.0 * f.get(i, j) - 5.0 * f.get(i, j - 1) + 4.0 * f.get(i, j - 2) - f.get(i, j - 3)) / h2
    } else {
        (f.get(i, j + 1) - 2.0 * f.get(i, j) + f.get(i, j - 1)) / h2
    }
}

// -- Grad-Shafranov operator ----------------------------------------------

/// Apply the operator d^2/dr^2 - (1/r) d/dr + d^2/dz^2 to a field sampled on
/// an (r, z) grid (`grid.x` is r). The grid must stay away from r = 0.
pub fn gs_operator(psi: &GridField) -> Result<GridField> {
    let g = &psi.grid;
    if g.x_min <= 0.0 {
        return Err(Error::GridTouchesAxis(g.x_min));
    }
    if g.nx < 4 || g.ny < 4 {
        return Err(Error::Config("gs_operator needs at least 4x4 nodes".into()));
    }
    let mut out = GridField::zeros(g.clone());
    for j in 0..g.ny {
        for i in 0..g.nx {
            let r = g.x(i);
            let v = d2_dx2(psi, i, j) - d_dx(psi, i, j) / r + d2_dy2(psi, i, j);
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Residual of the Grad-Shafranov equation for arbitrary profile closures:
/// Delta* psi + FF'(psi) + r^2 P'(psi), so any (psi, F^2, P') triple can be
/// checked, including deliberately wrong ones.
pub fn gs_equation_residual<FF, PP>(
    psi: &GridField,
    ff_prime: FF,
    p_prime: PP,
    exclude: impl Fn(f64, f64) -> bool,
) -> Result<SampledResidual>
where
    FF: Fn(f64) -> f64,
    PP: Fn(f64) -> f64,
{
    let lap = gs_operator(psi)?;
    let g = &psi.grid;
    let mut acc = Accumulator::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (r, z) = (g.x(i), g.y(j));
            if exclude(r, z) {
                continue;
            }
            let s = psi.get(i, j);
            let res = lap.get(i, j) + ff_prime(s) + r * r * p_prime(s);
            let boundary = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            acc.push(res, boundary);
        }
    }
    Ok(acc.finish())
}

// -- axisymmetric residuals ------------------------------------------------

/// (1/r) d(r u_r)/dr + d u_z / dz.
pub fn divergence_residual(
    field: &EulerField,
    exclude: impl Fn(f64, f64) -> bool,
) -> SampledResidual {
    let g = &field.grid;
    let r_ur = field.u_r.map_indexed(|v, i, _| v * g.x(i));
    let mut acc = Accumulator::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (r, z) = (g.x(i), g.y(j));
            if exclude(r, z) {
                continue;
            }
            let res = d_dx(&r_ur, i, j) / r + d_dy(&field.u_z, i, j);
            let boundary = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            acc.push(res, boundary);
        }
    }
    acc.finish()
}

/// Steady-state momentum residual w x u + grad(|u|^2/2 + p), with the curl
/// taken by finite differences of the sampled velocity.
pub fn euler_steady_residual(
    field: &EulerField,
    exclude: impl Fn(f64, f64) -> bool,
) -> SampledResidual {
    let g = &field.grid;
    let r_uphi = field.u_phi.map_indexed(|v, i, _| v * g.x(i));
    let bernoulli = field.p.map_indexed(|p, i, j| p + 0.5 * field.speed_sq(i, j));
    let mut acc = Accumulator::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (r, z) = (g.x(i), g.y(j));
            if exclude(r, z) {
                continue;
            }
            let w_r = -d_dy(&field.u_phi, i, j);
            let w_phi = d_dy(&field.u_r, i, j) - d_dx(&field.u_z, i, j);
            let w_z = d_dx(&r_uphi, i, j) / r;
            let (u_r, u_phi, u_z) = (
                field.u_r.get(i, j),
                field.u_phi.get(i, j),
                field.u_z.get(i, j),
            );
            let res_r = w_phi * u_z - w_z * u_phi + d_dx(&bernoulli, i, j);
            let res_phi = w_z * u_r - w_r * u_z;
            let res_z = w_r * u_phi - w_phi * u_r + d_dy(&bernoulli, i, j);
            let res = res_r.abs().max(res_phi.abs()).max(res_z.abs());
            let boundary = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            acc.push(res, boundary);
        }
    }
    acc.finish()
}

/// Advection of a scalar by the poloidal velocity: u_r dS/dr + u_z dS/dz.
pub fn u_dot_grad_residual(
    field: &EulerField,
    scalar: &GridField,
    exclude: impl Fn(f64, f64) -> bool,
) -> SampledResidual {
    let g = &field.grid;
    let mut acc = Accumulator::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (r, z) = (g.x(i), g.y(j));
            if exclude(r, z) {
                continue;
            }
            let res =
                field.u_r.get(i, j) * d_dx(scalar, i, j) + field.u_z.get(i, j) * d_dy(scalar, i, j);
            let boundary = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            acc.push(res, boundary);
        }
    }
    acc.finish()
}

// -- planar (2D Cartesian) residuals ----------------------------------------

/// d u1/dx + d u2/dy on a planar grid.
pub fn planar_divergence_residual(
    u1: &GridField,
    u2: &GridField,
    exclude: impl Fn(f64, f64) -> bool,
) -> SampledResidual {
    let g = &u1.grid;
    let mut acc = Accumulator::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            if exclude(g.x(i), g.y(j)) {
                continue;
            }
            let res = d_dx(u1, i, j) + d_dy(u2, i, j);
            let boundary = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            acc.push(res, boundary);
        }
    }
    acc.finish()
}

/// u . grad(scalar) on a planar grid.
pub fn planar_transport_residual(
    u1: &GridField,
    u2: &GridField,
    scalar: &GridField,
    exclude: impl Fn(f64, f64) -> bool,
) -> SampledResidual {
    let g = &u1.grid;
    let mut acc = Accumulator::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            if exclude(g.x(i), g.y(j)) {
                continue;
            }
            let res = u1.get(i, j) * d_dx(scalar, i, j) + u2.get(i, j) * d_dy(scalar, i, j);
            let boundary = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            acc.push(res, boundary);
        }
    }
    acc.finish()
}

/// Momentum residual u . grad(u) + grad(p) - forcing on a planar grid; the
/// forcing closure returns the body force at a node.
pub fn planar_momentum_residual(
    u1: &GridField,
    u2: &GridField,
    p: &GridField,
    forcing: impl Fn(usize, usize) -> [f64; 2],
    exclude: impl Fn(f64, f64) -> bool,
) -> SampledResidual {
    let g = &u1.grid;
    let mut acc = Accumulator::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            if exclude(g.x(i), g.y(j)) {
                continue;
            }
            let f = forcing(i, j);
            let adv1 = u1.get(i, j) * d_dx(u1, i, j) + u2.get(i, j) * d_dy(u1, i, j);
            let adv2 = u1.get(i, j) * d_dx(u2, i, j) + u2.get(i, j) * d_dy(u2, i, j);
            let r1 = adv1 + d_dx(p, i, j) - f[0];
            let r2 = adv2 + d_dy(p, i, j) - f[1];
            let res = r1.abs().max(r2.abs());
            let boundary = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
            acc.push(res, boundary);
        }
    }
    acc.finish()
}

// -- convergence studies -----------------------------------------------------

/// Fit the observed order from (h, residual) samples across refinements.
/// At least three levels are required; non-monotone sequences are flagged.
pub fn convergence_study(
    equation: &str,
    samples: &[(f64, SampledResidual)],
    tolerance: Option<f64>,
) -> Result<ResidualReport> {
    if samples.len() < 3 {
        return Err(Error::TooFewRefinements(samples.len()));
    }
    let hs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let maxes: Vec<f64> = samples.iter().map(|s| s.1.max).collect();
    let monotone = maxes.windows(2).all(|w| w[1] <= w[0]);
    let order = numerics::loglog_slope(&hs, &maxes);
    let last = samples.last().unwrap();
    Ok(ResidualReport {
        equation: equation.to_string(),
        h: last.0,
        max_res: last.1.max,
        l2_res: last.1.l2,
        order: Some(order),
        pass: tolerance.map(|t| last.1.max <= t),
        monotone: Some(monotone),
    })
}

/// Exclusion mask for a disc around a point.
pub fn exclude_ball(center: (f64, f64), radius: f64) -> impl Fn(f64, f64) -> bool {
    move |x, y| {
        let (dx, dy) = (x - center.0, y - center.1);
        dx * dx + dy * dy < radius * radius
    }
}

/// No exclusion.
pub fn exclude_none() -> impl Fn(f64, f64) -> bool {
    |_, _| false
}
