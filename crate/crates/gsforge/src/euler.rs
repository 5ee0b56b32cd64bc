//! Dimensional axisymmetric Euler fields from the rescaled stream function.
//!
//! With length scale `ell` and time scale `tau` (so m = 1/(2 ell tau)), the
//! rescaled solution maps to cylindrical coordinates through
//!
//! ```text
//!   r = ell (1 + x),   z = ell y,   psi = m ell^4 phi,
//!   u_r = (1/r) dz psi,  u_z = -(1/r) dr psi,  u_phi = F(psi) / r,
//!   F^2 = 6 m^2 ell^6 phi a(phi),   p = 2 m psi.
//! ```
//!
//! The profile functions close the system: |u|^2 / 2 = 3 m psi pointwise
//! (the localizability constraint) and the azimuthal vorticity satisfies
//! r w_phi = -(F F' + r^2 P') with P' = -5 m.

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::grid::{Grid2D, GridField};
use crate::scalar::Real;
use crate::stream::StreamSolution;

/// Length and time scales of the assembled solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalParams {
    pub ell: f64,
    pub tau: f64,
}

impl Default for DimensionalParams {
    fn default() -> Self {
        Self { ell: 1.0, tau: 0.5 }
    }
}

impl DimensionalParams {
    pub fn new(ell: f64, tau: f64) -> Self {
        assert!(ell > 0.0 && tau > 0.0);
        Self { ell, tau }
    }

    /// m = 1 / (2 ell tau); fixes p = 2 m psi = psi / (ell tau).
    pub fn m(&self) -> f64 {
        1.0 / (2.0 * self.ell * self.tau)
    }

    pub fn beta0(&self) -> f64 {
        self.ell * self.ell
    }

    pub fn velocity_scale(&self) -> f64 {
        self.m() * self.ell * self.ell
    }

    pub fn pressure_scale(&self) -> f64 {
        self.velocity_scale().powi(2)
    }
}

/// Support annulus metadata attached after a cutoff has been applied:
/// the field is exactly zero outside inner <= sqrt((r-ell)^2 + z^2) <= outer.
#[derive(Debug, Clone, Copy)]
pub struct SupportAnnulus {
    pub inner: f64,
    pub outer: f64,
    pub p_lo: f64,
    pub p_hi: f64,
}

/// Assembled cylindrical field on a uniform (r, z) grid.
#[derive(Debug, Clone)]
pub struct EulerField {
    pub params: DimensionalParams,
    /// (r, z) grid; `grid.x` is r, `grid.y` is z.
    pub grid: Grid2D,
    pub u_r: GridField,
    pub u_phi: GridField,
    pub u_z: GridField,
    pub p: GridField,
    pub psi: GridField,
    /// Rescaled stream function phi = psi / (m ell^4), kept for the swirl
    /// profile evaluations.
    pub phi: GridField,
    /// Sign branch chosen for F = +/- sqrt(F^2).
    pub swirl_sign: f64,
    pub localized: Option<SupportAnnulus>,
}

/// Build velocity, pressure and stream function from a resolved stream
/// solution. The swirl branch is F = + sqrt(F^2).
pub fn assemble(stream: &StreamSolution, params: DimensionalParams) -> Result<EulerField> {
    let (u, v) = stream.compute_uv()?;
    let g = &stream.grid;
    let (ell, m) = (params.ell, params.m());
    let vel = params.velocity_scale();
    let geometry = &stream.geometry;

    let grid_rz = Grid2D::new(
        ell * (1.0 + g.x_min),
        ell * (1.0 + g.x_max),
        ell * g.y_min,
        ell * g.y_max,
        g.nx,
        g.ny,
    );

    let mut u_r = GridField::zeros(grid_rz.clone());
    let mut u_phi = GridField::zeros(grid_rz.clone());
    let mut u_z = GridField::zeros(grid_rz.clone());
    let mut p = GridField::zeros(grid_rz.clone());
    let mut psi = GridField::zeros(grid_rz.clone());
    let mut phi = GridField::zeros(grid_rz.clone());

    for j in 0..g.ny {
        for i in 0..g.nx {
            let x = g.x(i);
            let ph = stream.phi.get(i, j);
            let a = geometry.profiles().a().eval_unchecked(ph);
            let swirl_sq = ph * a;
            if swirl_sq < -1e-12 {
                return Err(Error::SwirlImaginary {
                    phi: ph,
                    value: swirl_sq,
                });
            }
            let denom = 1.0 + x;
            u_r.set(i, j, vel * v.get(i, j) / denom);
            u_z.set(i, j, -vel * u.get(i, j) / denom);
            u_phi.set(i, j, vel * (6.0 * swirl_sq.max(0.0)).sqrt() / denom);
            let psi_v = m * ell.powi(4) * ph;
            psi.set(i, j, psi_v);
            p.set(i, j, 2.0 * m * psi_v);
            phi.set(i, j, ph);
        }
    }

    Ok(EulerField {
        params,
        grid: grid_rz,
        u_r,
        u_phi,
        u_z,
        p,
        psi,
        phi,
        swirl_sign: 1.0,
        localized: None,
    })
}

/// Vorticity components on the grid of an [`EulerField`].
#[derive(Debug, Clone)]
pub struct Vorticity {
    pub w_r: GridField,
    pub w_phi: GridField,
    pub w_z: GridField,
}

impl EulerField {
    pub fn r(&self, i: usize) -> f64 {
        self.grid.x(i)
    }

    pub fn z(&self, j: usize) -> f64 {
        self.grid.y(j)
    }

    /// F F' as a function of the rescaled stream value.
    pub fn ff_prime(&self, geometry: &Geometry, phi: f64) -> f64 {
        let m = self.params.m();
        let ell = self.params.ell;
        let a = geometry.profiles().a().eval_unchecked(phi);
        let a_d = geometry.profiles().a().eval_deriv(phi).unwrap_or(f64::NAN);
        3.0 * m * ell * ell * (a + phi * a_d)
    }

    /// d p / d psi (constant by construction).
    pub fn p_prime(&self) -> f64 {
        2.0 * self.params.m()
    }

    /// Plasma-pressure slope P' = -5 m, forced by p' = 2m and A' = 3m.
    pub fn plasma_p_prime(&self) -> f64 {
        -5.0 * self.params.m()
    }

    /// Bernoulli function A(psi) = 3 m psi of the localizability constraint.
    pub fn bernoulli_a(&self, psi: f64) -> f64 {
        3.0 * self.params.m() * psi
    }

    pub fn speed_sq(&self, i: usize, j: usize) -> f64 {
        self.u_r.get(i, j).powi(2) + self.u_phi.get(i, j).powi(2) + self.u_z.get(i, j).powi(2)
    }

    /// max | |u|^2/2 - 3 m psi | over the grid, in units of the squared
    /// velocity scale.
    pub fn bernoulli_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let res = 0.5 * self.speed_sq(i, j) - self.bernoulli_a(self.psi.get(i, j));
                worst = worst.max(res.abs());
            }
        }
        worst / self.params.pressure_scale()
    }

    /// Negative control: same field with the swirl removed.
    pub fn without_swirl(&self) -> Self {
        let mut f = self.clone();
        f.u_phi = GridField::zeros(self.grid.clone());
        f
    }

    /// Vorticity through the profile derivatives: w = -F'(psi) u + 5 m r e_phi,
    /// with the product F' u given its (zero) limit where F vanishes.
    pub fn vorticity(&self, geometry: &Geometry) -> Vorticity {
        let m = self.params.m();
        let ell = self.params.ell;
        let mut w_r = GridField::zeros(self.grid.clone());
        let mut w_phi = GridField::zeros(self.grid.clone());
        let mut w_z = GridField::zeros(self.grid.clone());
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let r = self.r(i);
                let ph = self.phi.get(i, j);
                let ffp = self.ff_prime(geometry, ph);
                let gs_rhs = -(ffp + r * r * self.plasma_p_prime());
                w_phi.set(i, j, gs_rhs / r);
                let a = geometry.profiles().a().eval_unchecked(ph);
                let f_sq = 6.0 * (m * ell.powi(3)).powi(2) * ph * a;
                if f_sq > 0.0 {
                    let f_prime = self.swirl_sign * ffp / f_sq.sqrt();
                    w_r.set(i, j, -f_prime * self.u_r.get(i, j));
                    w_z.set(i, j, -f_prime * self.u_z.get(i, j));
                }
            }
        }
        Vorticity { w_r, w_phi, w_z }
    }

    /// Grid argmin of the pressure; `strict` reports whether the minimum
    /// node is unique.
    pub fn pressure_argmin(&self) -> (usize, usize, bool) {
        let mut best = (0usize, 0usize);
        let mut best_v = f64::INFINITY;
        let mut ties = 0usize;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let v = self.p.get(i, j);
                if v < best_v {
                    best_v = v;
                    best = (i, j);
                    ties = 0;
                } else if v == best_v {
                    ties += 1;
                }
            }
        }
        (best.0, best.1, ties == 0)
    }

    /// Bilinear Cartesian sampler over the stored grids.
    pub fn sampler(&self) -> CartesianSampler<'_> {
        CartesianSampler { field: self }
    }
}

/// Velocity, pressure and stream value at a Cartesian point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleValue {
    pub u: [Real; 3],
    pub p: Real,
    pub psi: Real,
}

impl SampleValue {
    pub const ZERO: SampleValue = SampleValue {
        u: [0.0; 3],
        p: 0.0,
        psi: 0.0,
    };
}

/// Bilinear interpolation in (r, z) with exact azimuthal rotation.
#[derive(Debug, Clone, Copy)]
pub struct CartesianSampler<'a> {
    field: &'a EulerField,
}

impl CartesianSampler<'_> {
    pub fn sample(&self, pt: [f64; 3]) -> Result<SampleValue> {
        let g = &self.field.grid;
        let r = pt[0].hypot(pt[1]);
        let z = pt[2];
        if r < g.x_min || r > g.x_max || z < g.y_min || z > g.y_max {
            return if self.field.localized.is_some() {
                Ok(SampleValue::ZERO)
            } else {
                Err(Error::SamplerOutOfRange {
                    x: pt[0],
                    y: pt[1],
                    z: pt[2],
                })
            };
        }
        let interp = |f: &GridField| bilinear(f, r, z);
        let u_r = interp(&self.field.u_r);
        let u_phi = interp(&self.field.u_phi);
        let u_z = interp(&self.field.u_z);
        let p = interp(&self.field.p);
        let psi = interp(&self.field.psi);
        let (sin_t, cos_t) = if r > 0.0 {
            (pt[1] / r, pt[0] / r)
        } else {
            (0.0, 1.0)
        };
        Ok(SampleValue {
            u: [
                u_r * cos_t - u_phi * sin_t,
                u_r * sin_t + u_phi * cos_t,
                u_z,
            ],
            p,
            psi,
        })
    }
}

fn bilinear(f: &GridField, x: f64, y: f64) -> f64 {
    let g = &f.grid;
    let fx = ((x - g.x_min) / g.hx()).clamp(0.0, (g.nx - 1) as f64);
    let fy = ((y - g.y_min) / g.hy()).clamp(0.0, (g.ny - 1) as f64);
    let i = (fx.floor() as usize).min(g.nx - 2);
    let j = (fy.floor() as usize).min(g.ny - 2);
    let tx = fx - i as f64;
    let ty = fy - j as f64;
    f.get(i, j) * (1.0 - tx) * (1.0 - ty)
        + f.get(i + 1, j) * tx * (1.0 - ty)
        + f.get(i, j + 1) * (1.0 - tx) * ty
        + f.get(i + 1, j + 1) * tx * ty
}
