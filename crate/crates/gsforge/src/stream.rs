//! Stream-function construction near the degenerate point.
//!
//! The scalar phi(x, y) is built on a centered grid from the characteristic
//! system
//!
//! ```text
//!   d phi / dx = P3(x, phi),          (phi(x, 0) = delta(x) on the glue row)
//!   d phi / dy = sgn(y) sqrt(P6),     (axis column by inverting Y)
//! ```
//!
//! marching each y-row in x from the axis column. The non-Lipschitz axis ODE
//! is never time-stepped: the axis values always come from the Y-inversion,
//! which selects the nontrivial positive branch. Evenness in y is exact by
//! construction.

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::grid::{Grid2D, GridField};
use crate::numerics;
use rayon::prelude::*;

/// Substeps of the row stepper per grid cell.
const ROW_SUBSTEPS: usize = 4;

/// Tolerance below which a slightly negative P6 sample is clamped to zero;
/// anything more negative aborts as a domain violation.
pub const P6_CLAMP_TOL: f64 = 1e-10;

/// The constructed stream function and its hodograph velocity components.
#[derive(Debug, Clone)]
pub struct StreamSolution {
    pub geometry: Geometry,
    pub grid: Grid2D,
    pub phi: GridField,
    /// Radius of the resolved disc in the (x, y) plane.
    pub eps_disc: f64,
}

/// Fill the grid with phi. The grid must carry node lines on both axes and
/// fit inside the resolved ranges of `geometry`.
pub fn build_phi(geometry: &Geometry, grid: &Grid2D) -> Result<StreamSolution> {
    if !grid.is_centered() {
        return Err(Error::GridNotCentered);
    }
    let eps = geometry.eps_interval();
    let ci = grid.nx / 2;
    let cj = grid.ny / 2;

    // glue row y = 0: the characteristic boundary curve
    let glue_row = march_row(geometry, grid, 0.0, ci, eps, 0.0)?;

    // upper rows in parallel; each starts from its own axis inversion
    let upper: Vec<Vec<f64>> = (cj + 1..grid.ny)
        .into_par_iter()
        .map(|j| {
            let y = grid.y(j);
            let phi0 = geometry.phi_axis(y)?;
            march_row(geometry, grid, phi0, ci, eps, y)
        })
        .collect::<Result<_>>()?;

    let mut phi = GridField::zeros(grid.clone());
    for i in 0..grid.nx {
        phi.set(i, cj, glue_row[i]);
    }
    for (k, row) in upper.iter().enumerate() {
        let j = cj + 1 + k;
        for i in 0..grid.nx {
            phi.set(i, j, row[i]);
            phi.set(i, cj - 1 - k, row[i]); // mirror: phi(x, -y) = phi(x, y)
        }
    }
    phi.validate()?;

    // domain membership: strictly above the boundary curve off the glue row
    for j in 0..grid.ny {
        if j == cj {
            continue;
        }
        for i in 0..grid.nx {
            if phi.get(i, j) <= glue_row[i] {
                return Err(Error::DomainExit {
                    x: grid.x(i),
                    y: grid.y(j),
                    phi: phi.get(i, j),
                    eps,
                });
            }
        }
    }

    Ok(StreamSolution {
        geometry: geometry.clone(),
        grid: grid.clone(),
        phi,
        eps_disc: grid.inscribed_radius(),
    })
}

fn march_row(
    geometry: &Geometry,
    grid: &Grid2D,
    phi0: f64,
    ci: usize,
    eps: f64,
    y: f64,
) -> Result<Vec<f64>> {
    let f = |x: f64, p: f64| geometry.p3(x, p);
    let mut row = vec![0.0; grid.nx];
    row[ci] = phi0;
    for dir in [-1i64, 1] {
        let mut p = phi0;
        let mut k = ci as i64;
        loop {
            let next = k + dir;
            if next < 0 || next >= grid.nx as i64 {
                break;
            }
            p = numerics::rk4(&f, grid.x(k as usize), p, grid.x(next as usize), ROW_SUBSTEPS);
            if p.abs() > eps {
                return Err(Error::DomainExit {
                    x: grid.x(next as usize),
                    y,
                    phi: p,
                    eps,
                });
            }
            row[next as usize] = p;
            k = next;
        }
    }
    Ok(row)
}

impl StreamSolution {
    /// Hodograph components on the grid: U = P3(x, phi) and
    /// V = sgn(y) sqrt(P6(x, phi)), with V = 0 on the glue row.
    pub fn compute_uv(&self) -> Result<(GridField, GridField)> {
        let cj = self.grid.ny / 2;
        let mut u = GridField::zeros(self.grid.clone());
        let mut v = GridField::zeros(self.grid.clone());
        for j in 0..self.grid.ny {
            let y = self.grid.y(j);
            for i in 0..self.grid.nx {
                let x = self.grid.x(i);
                let p = self.phi.get(i, j);
                u.set(i, j, self.geometry.p3(x, p));
                if j == cj {
                    v.set(i, j, 0.0);
                    continue;
                }
                let p6 = self.geometry.p6(x, p);
                if p6 < -P6_CLAMP_TOL {
                    return Err(Error::NegativeP6 {
                        x,
                        phi: p,
                        value: p6,
                    });
                }
                v.set(i, j, y.signum() * p6.max(0.0).sqrt());
            }
        }
        Ok((u, v))
    }

    /// Compare centered finite differences of phi against the hodograph
    /// components; rows adjacent to the glue row use one-sided second-order
    /// stencils. Returns (max |d phi/dx - U|, max |d phi/dy - V|).
    pub fn gradient_consistency(&self, u: &GridField, v: &GridField) -> (f64, f64) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let (hx, hy) = (self.grid.hx(), self.grid.hy());
        let cj = ny / 2;
        let mut res_x: f64 = 0.0;
        let mut res_y: f64 = 0.0;
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let fd_x = (self.phi.get(i + 1, j) - self.phi.get(i - 1, j)) / (2.0 * hx);
                res_x = res_x.max((fd_x - u.get(i, j)).abs());
                let fd_y = if j == cj {
                    // both sides vanish by the odd symmetry of V
                    0.0
                } else if j == cj + 1 {
                    (-3.0 * self.phi.get(i, j) + 4.0 * self.phi.get(i, j + 1)
                        - self.phi.get(i, j + 2))
                        / (2.0 * hy)
                } else if j == cj - 1 {
                    (3.0 * self.phi.get(i, j) - 4.0 * self.phi.get(i, j - 1)
                        + self.phi.get(i, j - 2))
                        / (2.0 * hy)
                } else {
                    (self.phi.get(i, j + 1) - self.phi.get(i, j - 1)) / (2.0 * hy)
                };
                let v_ref = if j == cj { 0.0 } else { v.get(i, j) };
                res_y = res_y.max((fd_y - v_ref).abs());
            }
        }
        (res_x, res_y)
    }

    /// Closed-one-form check: reconstruct phi along the boundary-first path
    /// (glue row in x, then the column quadrature of V) and compare with the
    /// axis-first construction. Returns the max-abs disagreement.
    pub fn path_independence(&self, v: &GridField) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let cj = ny / 2;
        let hy = self.grid.hy();
        let mut worst: f64 = 0.0;
        for i in 0..nx {
            let column: Vec<f64> = (cj..ny).map(|j| v.get(i, j)).collect();
            let integral = numerics::cumulative_integral(&column, hy);
            let delta = self.phi.get(i, cj);
            for (k, acc) in integral.iter().enumerate() {
                let rebuilt = delta + acc;
                worst = worst.max((rebuilt - self.phi.get(i, cj + k)).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;
    use crate::profiles::{solve_profiles, DEFAULT_ORDER};
    use approx::assert_relative_eq;

    fn solution(n: usize) -> StreamSolution {
        let g = Geometry::new(solve_profiles::<f64>(DEFAULT_ORDER).unwrap());
        let grid = Grid2D::centered(0.12, 0.12, n, n).unwrap();
        build_phi(&g, &grid).unwrap()
    }

    #[test]
    fn origin_and_glue_row() {
        let s = solution(81);
        let (ci, cj) = (s.grid.nx / 2, s.grid.ny / 2);
        assert_eq!(s.phi.get(ci, cj), 0.0);
        // glue row equals the boundary curve
        let curve = s.geometry.boundary_delta(0.12, 1e-3).unwrap();
        for i in (0..s.grid.nx).step_by(9) {
            assert_relative_eq!(
                s.phi.get(i, cj),
                curve.eval(s.grid.x(i)),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn even_in_y_exactly() {
        let s = solution(41);
        let cj = s.grid.ny / 2;
        for j in 0..s.grid.ny {
            for i in 0..s.grid.nx {
                assert_eq!(s.phi.get(i, j), s.phi.get(i, 2 * cj - j));
            }
        }
    }

    #[test]
    fn interior_nodes_stay_in_domain() {
        let s = solution(61);
        let cj = s.grid.ny / 2;
        for j in 0..s.grid.ny {
            if j == cj {
                continue;
            }
            for i in 0..s.grid.nx {
                assert!(s
                    .geometry
                    .in_domain(s.grid.x(i), s.phi.get(i, j))
                    .unwrap());
            }
        }
    }

    #[test]
    fn uv_values() {
        let s = solution(81);
        let (u, v) = s.compute_uv().unwrap();
        let (ci, cj) = (s.grid.nx / 2, s.grid.ny / 2);
        assert_eq!(u.get(ci, cj), s.geometry.p3(0.0, 0.0));
        assert_eq!(u.get(ci, cj).abs() < 1e-15, true);
        assert_eq!(v.get(ci, cj), 0.0);
        // V(0, y) ~ 2y near the origin
        for dj in [2usize, 4, 6] {
            let y = s.grid.y(cj + dj);
            assert_relative_eq!(v.get(ci, cj + dj), 2.0 * y, max_relative = 0.05);
        }
        // odd in y
        for j in 0..s.grid.ny {
            for i in (0..s.grid.nx).step_by(11) {
                assert_eq!(v.get(i, j), -v.get(i, 2 * cj - j));
            }
        }
    }

    #[test]
    fn gradient_consistency_second_order() {
        let res = [41usize, 81]
            .iter()
            .map(|&n| {
                let s = solution(n);
                let (u, v) = s.compute_uv().unwrap();
                s.gradient_consistency(&u, &v)
            })
            .collect::<Vec<_>>();
        let rate_x = (res[0].0 / res[1].0).log2();
        let rate_y = (res[0].1 / res[1].1).log2();
        assert!((rate_x - 2.0).abs() < 0.4, "x rate {rate_x}");
        assert!((rate_y - 2.0).abs() < 0.4, "y rate {rate_y}");
    }

    #[test]
    fn paths_agree() {
        let s = solution(101);
        let (_, v) = s.compute_uv().unwrap();
        let worst = s.path_independence(&v);
        assert!(worst <= 1e-7, "path disagreement {worst}");
    }

    #[test]
    fn oversized_grid_aborts_with_location() {
        let g = Geometry::new(solve_profiles::<f64>(DEFAULT_ORDER).unwrap());
        let grid = Grid2D::centered(0.9, 0.9, 41, 41).unwrap();
        match build_phi(&g, &grid) {
            Err(Error::DomainExit { x, y, .. }) => {
                assert!(x.abs() <= 0.9 && y.abs() <= 0.9);
            }
            Err(Error::AxisRangeExceeded { .. }) => {}
            other => panic!("expected domain exit, got {other:?}"),
        }
    }

    #[test]
    fn off_center_grid_rejected() {
        let g = Geometry::new(solve_profiles::<f64>(DEFAULT_ORDER).unwrap());
        let grid = Grid2D::new(-0.1, 0.12, -0.1, 0.1, 41, 41);
        assert!(matches!(
            build_phi(&g, &grid),
            Err(Error::GridNotCentered)
        ));
    }
}
