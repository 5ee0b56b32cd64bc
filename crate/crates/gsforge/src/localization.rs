//! Localization and multiscale superposition.
//!
//! A pressure cutoff phi_c(p) maps a steady field (u, p) with u . grad p = 0
//! onto the steady field (phi_c(p) u, P(p)) with P' = phi_c^2, supported in an
//! annular shell that omits the degenerate point. A normalized compact
//! template built this way is then superposed over disjoint shells
//!
//! ```text
//!   u(x) = sum_n  U_n R_n u_B( R_n^T (x - x_n) / l_n ),
//! ```
//!
//! whose W^{alpha,p} size scales like (sum_n U_n^p l_n^{3 - p alpha})^{1/p}.
//!
//! Numerical note: shell scales decay geometrically and quickly pass below
//! the absolute f64 resolution of O(1) coordinates, so within-shell geometry
//! (Hölder pairs, dissipation stencils) is always evaluated in the template
//! frame, where it is exact at every scale; absolute Cartesian queries are
//! offered alongside and agree for representable shells.

use crate::cutoff::CutoffSpec;
use crate::error::{Error, Result};
use crate::euler::{
    assemble, DimensionalParams, EulerField, SampleValue, SupportAnnulus,
};
use crate::geometry::Geometry;
use crate::grid::Grid2D;
use crate::numerics;
use crate::profiles::solve_profiles;
use crate::stream::{build_phi, StreamSolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

// -- cutoff application on assembled grids ----------------------------------

/// Pick bump thresholds so the support annulus of the cutoff field lies in
/// { eps/sqrt(2) < dist < eps } around (ell, 0), where eps is the resolved
/// disc radius of the field and dist^2 = (r - ell)^2 + z^2.
///
/// p_lo is the attained maximum over the closed inner disc (radius
/// eps/sqrt(2)); p_hi the attained minimum over the outer band
/// [band_frac * eps, eps]. Small relative margins keep the support strictly
/// inside against between-node variation.
pub fn annulus_thresholds(field: &EulerField, band_frac: f64) -> Result<(f64, f64)> {
    let g = &field.grid;
    let ell = field.params.ell;
    let eps = inscribed_annulus_radius(field);
    let r_in = eps / 2.0_f64.sqrt();
    let r_out_lo = band_frac * eps;
    let mut p_lo = f64::NEG_INFINITY;
    let mut p_hi = f64::INFINITY;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let d = (g.x(i) - ell).hypot(g.y(j));
            let p = field.p.get(i, j);
            if d <= r_in {
                p_lo = p_lo.max(p);
            }
            if d >= r_out_lo && d <= eps {
                p_hi = p_hi.min(p);
            }
        }
    }
    let (p_lo, p_hi) = (p_lo * (1.0 + 1e-3), p_hi * (1.0 - 1e-3));
    if !(p_lo.is_finite() && p_hi.is_finite()) || p_lo >= p_hi {
        return Err(Error::ThresholdsOutOfRange {
            p_lo,
            p_hi,
            attained_lo: 0.0,
            attained_hi: field.p.max_abs(),
        });
    }
    Ok((p_lo, p_hi))
}

/// Radius of the largest disc around (ell, 0) resolved by the field grid.
pub fn inscribed_annulus_radius(field: &EulerField) -> f64 {
    let g = &field.grid;
    let ell = field.params.ell;
    (g.x_max - ell)
        .min(ell - g.x_min)
        .min(g.y_max)
        .min(-g.y_min)
}

/// u~ = phi_c(p) u with the pressure rebuilt as p~ = Phi(p), Phi' = phi_c^2.
pub fn apply_cutoff(field: &EulerField, cutoff: &CutoffSpec) -> Result<EulerField> {
    let g = &field.grid;
    if let Some((p_lo, p_hi)) = cutoff.thresholds() {
        let mut attained_lo = f64::INFINITY;
        let mut attained_hi = f64::NEG_INFINITY;
        for &v in field.p.values() {
            attained_lo = attained_lo.min(v);
            attained_hi = attained_hi.max(v);
        }
        if p_lo < attained_lo || p_hi > attained_hi {
            return Err(Error::ThresholdsOutOfRange {
                p_lo,
                p_hi,
                attained_lo,
                attained_hi,
            });
        }
    }
    let mut out = field.clone();
    let ell = field.params.ell;
    let mut inner = f64::INFINITY;
    let mut outer: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = field.p.get(i, j);
            let c = cutoff.value(p);
            out.u_r.set(i, j, c * field.u_r.get(i, j));
            out.u_phi.set(i, j, c * field.u_phi.get(i, j));
            out.u_z.set(i, j, c * field.u_z.get(i, j));
            out.p.set(i, j, cutoff.antiderivative(p, 2));
            if c != 0.0 {
                let d = (g.x(i) - ell).hypot(g.y(j));
                inner = inner.min(d);
                outer = outer.max(d);
            }
        }
    }
    if !cutoff.is_identity() {
        let (p_lo, p_hi) = cutoff.thresholds().unwrap();
        out.localized = Some(SupportAnnulus {
            inner,
            outer,
            p_lo,
            p_hi,
        });
    }
    Ok(out)
}

// -- the compact template -----------------------------------------------------

/// Build parameters for the normalized template.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TemplateConfig {
    /// Truncation order of the profile series.
    pub order: usize,
    /// Half-width of the rescaled (x, y) grid used for measurements.
    pub domain_half: f64,
    /// Measurement grid nodes per axis (odd).
    pub grid_n: usize,
    /// Ramp fraction of the pressure window.
    pub ramp_fraction: f64,
    /// Fraction of the disc radius where the outer pressure band starts.
    pub band_frac: f64,
}

impl Default for TemplateConfig {
    fn default() -> Self {
        Self {
            order: crate::profiles::DEFAULT_ORDER,
            domain_half: 0.12,
            grid_n: 257,
            ramp_fraction: 0.25,
            band_frac: 0.93,
        }
    }
}

/// Normalized compact steady field: support inside the unit ball, peak speed
/// one. Sampling is exact-mode: the stream value is recomputed pointwise, so
/// derivatives seen by finite differences are smooth down to the stepper
/// tolerance rather than to a grid interpolation error.
#[derive(Debug, Clone)]
pub struct Template {
    geometry: Geometry,
    params: DimensionalParams,
    cutoff: CutoffSpec,
    /// Coordinate factor: template coords = sigma * physical coords.
    sigma: f64,
    /// Amplitude factor applied to u (and squared on p).
    amp: f64,
    /// Resolved disc radius of the underlying construction.
    pub eps_disc: f64,
    /// Support annulus radii in template coordinates.
    pub support_inner: f64,
    pub support_outer: f64,
    /// Measured sup |u_B| (1 after normalization) and L2 norm.
    pub max_speed: f64,
    pub l2_norm: f64,
    /// A point (in template coordinates) where the cutoff plateau is active.
    pub active_point: [f64; 3],
}

impl Template {
    pub fn build(cfg: &TemplateConfig) -> Result<Arc<Template>> {
        let profiles = solve_profiles::<f64>(cfg.order)?;
        let geometry = Geometry::new(profiles);
        let params = DimensionalParams::new(1.0, 0.5); // m = 1
        let grid = Grid2D::centered(cfg.domain_half, cfg.domain_half, cfg.grid_n, cfg.grid_n)?;
        let stream = build_phi(&geometry, &grid)?;
        let raw = assemble(&stream, params)?;
        let (p_lo, p_hi) = annulus_thresholds(&raw, cfg.band_frac)?;
        let cutoff = CutoffSpec::bump(p_lo, p_hi, cfg.ramp_fraction)?;
        let field = apply_cutoff(&raw, &cutoff)?;
        let meta = field.localized.expect("cutoff applied");

        // normalization and L2 norm from the measurement grid
        let mut max_speed: f64 = 0.0;
        let mut l2_sq = 0.0;
        let (hx, hy) = (field.grid.hx(), field.grid.hy());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let s2 = field.speed_sq(i, j);
                max_speed = max_speed.max(s2.sqrt());
                l2_sq += s2 * std::f64::consts::TAU * field.grid.x(i) * hx * hy;
            }
        }
        let sigma = 1.0 / (1.0 + stream.eps_disc);
        let amp = 1.0 / max_speed;
        // L2 after amplitude and coordinate normalization
        let l2_norm = (l2_sq * amp * amp * sigma.powi(3)).sqrt();

        // a plateau point: pressure at the window midpoint along z = 0
        let p_mid = 0.5 * (p_lo + p_hi);
        let mut active_r = field.grid.x_max;
        for i in (0..grid.nx).rev() {
            if field.p.get(i, grid.ny / 2) >= p_mid && field.grid.x(i) > params.ell {
                active_r = field.grid.x(i);
                break;
            }
        }

        Ok(Arc::new(Template {
            geometry,
            params,
            cutoff,
            sigma,
            amp,
            eps_disc: stream.eps_disc,
            support_inner: sigma * meta.inner,
            support_outer: sigma * meta.outer,
            max_speed: 1.0,
            l2_norm,
            active_point: [sigma * active_r, 0.0, 0.0],
        }))
    }

    /// Ring radius of the support torus in template coordinates.
    pub fn ring_radius(&self) -> f64 {
        self.sigma * self.params.ell
    }

    /// Exact-mode sample; identically zero outside the support shell.
    pub fn sample(&self, pt: [f64; 3]) -> SampleValue {
        let rho = pt[0].hypot(pt[1]);
        let (r, z) = (rho / self.sigma, pt[2] / self.sigma);
        let ell = self.params.ell;
        let x = r / ell - 1.0;
        let y = z / ell;
        let dist2 = x * x + y * y;
        if dist2 >= self.eps_disc * self.eps_disc {
            return SampleValue::ZERO;
        }
        let Ok(phi) = self.geometry.phi_at(x, y) else {
            return SampleValue::ZERO;
        };
        let m = self.params.m();
        let psi = m * ell.powi(4) * phi;
        let p = 2.0 * m * psi;
        let c = self.cutoff.value(p);
        if c == 0.0 {
            return SampleValue::ZERO;
        }
        let vel = self.params.velocity_scale();
        let denom = 1.0 + x;
        let u_big = self.geometry.p3(x, phi);
        let p6 = self.geometry.p6(x, phi).max(0.0);
        let v_big = y.signum() * p6.sqrt();
        let a = self.geometry.profiles().a().eval_unchecked(phi);
        let u_r = c * vel * v_big / denom;
        let u_phi = c * vel * (6.0 * (phi * a).max(0.0)).sqrt() / denom;
        let u_z = -c * vel * u_big / denom;
        let (sin_t, cos_t) = if rho > 0.0 {
            (pt[1] / rho, pt[0] / rho)
        } else {
            (0.0, 1.0)
        };
        SampleValue {
            u: [
                self.amp * (u_r * cos_t - u_phi * sin_t),
                self.amp * (u_r * sin_t + u_phi * cos_t),
                self.amp * u_z,
            ],
            p: self.amp * self.amp * self.cutoff.antiderivative(p, 2),
            psi: self.amp * self.amp * psi,
        }
    }

    /// |u_B|^2 / 2 + p_B, the Bernoulli function fed to dissipation checks.
    pub fn bernoulli(&self, pt: [f64; 3]) -> f64 {
        let v = self.sample(pt);
        0.5 * numerics::dot(v.u, v.u) + v.p
    }

    /// Deterministic points inside the support shell where the field is
    /// active, parameterized over the torus.
    pub fn support_points(&self, count: usize, seed: u64) -> Vec<[f64; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = self.ring_radius();
        let mut out = Vec::with_capacity(count);
        let mut guard = 0usize;
        while out.len() < count && guard < 200 * count {
            guard += 1;
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let minor: f64 = rng.gen_range(self.support_inner..self.support_outer);
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rho = ring + minor * angle.cos();
            let pt = [rho * theta.cos(), rho * theta.sin(), minor * angle.sin()];
            if numerics::dot(self.sample(pt).u, self.sample(pt).u) > 0.0 {
                out.push(pt);
            }
        }
        out
    }
}

// -- shell placements ----------------------------------------------------------

/// One term of the multiscale sum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShellPlacement {
    pub center: [f64; 3],
    pub rotation: [[f64; 3]; 3],
    pub scale: f64,
    pub amplitude: f64,
}

impl ShellPlacement {
    pub fn identity(scale: f64, amplitude: f64) -> Self {
        Self {
            center: [0.0; 3],
            rotation: numerics::identity3(),
            scale,
            amplitude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if numerics::orthogonality_defect(&self.rotation) > 1e-12 {
            return Err(Error::Config("placement rotation is not orthogonal".into()));
        }
        if !(self.scale > 0.0) || !(self.amplitude >= 0.0) {
            return Err(Error::Config("placement scale/amplitude invalid".into()));
        }
        Ok(())
    }
}

/// Helix from which shell centers and orientations are generated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HelixSpec {
    pub radius: f64,
    pub pitch: f64,
    /// Largest shell scale.
    pub scale0: f64,
    /// Geometric decay ratio of successive scales (0 < ratio < 1).
    pub ratio: f64,
    /// Arclength spacing in units of (l_n + l_{n+1}).
    pub spacing_factor: f64,
}

impl Default for HelixSpec {
    fn default() -> Self {
        Self {
            radius: 0.25,
            pitch: 0.08,
            scale0: 0.05,
            ratio: 1.0 / 16.0,
            spacing_factor: 3.0,
        }
    }
}

/// Decorate the helix with shells of geometrically decaying scale l_n and
/// amplitude U_n = l_n^alpha, axes tangent to the curve.
pub fn helical_placements(
    n_shells: usize,
    alpha_target: f64,
    spec: &HelixSpec,
) -> Result<Vec<ShellPlacement>> {
    if n_shells == 0 {
        return Err(Error::InfeasiblePacking("zero shells requested".into()));
    }
    if !(spec.ratio > 0.0 && spec.ratio < 1.0) || !(spec.scale0 > 0.0) {
        return Err(Error::InfeasiblePacking(format!(
            "scale sequence l_n = {} * {}^n is not a decaying geometric sequence",
            spec.scale0, spec.ratio
        )));
    }
    let arc_rate = spec.radius.hypot(spec.pitch);
    if spec.spacing_factor * (spec.scale0 * (1.0 + spec.ratio)) > std::f64::consts::PI * arc_rate {
        return Err(Error::InfeasiblePacking(
            "largest shells do not fit along one turn of the curve".into(),
        ));
    }
    let mut placements = Vec::with_capacity(n_shells);
    let mut t = 0.0_f64;
    for n in 0..n_shells {
        let scale = spec.scale0 * spec.ratio.powi(n as i32);
        let amplitude = scale.powf(alpha_target);
        let center = [
            spec.radius * t.cos(),
            spec.radius * t.sin(),
            spec.pitch * t,
        ];
        let tangent = numerics::normalize([
            -spec.radius * t.sin(),
            spec.radius * t.cos(),
            spec.pitch,
        ]);
        let rotation = numerics::rotation_between([0.0, 0.0, 1.0], tangent);
        placements.push(ShellPlacement {
            center,
            rotation,
            scale,
            amplitude,
        });
        let next_scale = scale * spec.ratio;
        t += spec.spacing_factor * (scale + next_scale) / arc_rate;
    }
    check_disjoint(&placements)?;
    Ok(placements)
}

/// Pairwise ball-disjointness: |x_i - x_j| > l_i + l_j, with sub-resolution
/// sibling shells compared through their exact arclength offsets.
fn check_disjoint(placements: &[ShellPlacement]) -> Result<()> {
    for i in 0..placements.len() {
        for j in i + 1..placements.len() {
            let (a, b) = (&placements[i], &placements[j]);
            let required = a.scale + b.scale;
            let d = numerics::norm([
                a.center[0] - b.center[0],
                a.center[1] - b.center[1],
                a.center[2] - b.center[2],
            ]);
            // Centers of very deep shells coincide in f64; their separation
            // is below coordinate resolution but above their own diameters
            // only if the generator said so. Treat exact center collisions of
            // shells smaller than coordinate resolution as generator-spaced.
            let coord_eps = 16.0 * f64::EPSILON * numerics::norm(a.center).max(1.0);
            if d <= required && required > coord_eps {
                return Err(Error::OverlappingShells {
                    i,
                    j,
                    dist: d,
                    required,
                });
            }
        }
    }
    Ok(())
}

// -- the multiscale field -------------------------------------------------------

/// Node of a tiny bounding-volume tree over the shells.
#[derive(Debug, Clone)]
enum BvhNode {
    Leaf(usize),
    Split {
        axis: usize,
        lo: Box<BvhNode>,
        hi: Box<BvhNode>,
        lo_max: f64,
        hi_min: f64,
    },
}

/// Superposition of rotated, scaled, amplitude-weighted template copies over
/// pairwise disjoint shells.
#[derive(Debug, Clone)]
pub struct MultiscaleField {
    pub template: Arc<Template>,
    pub placements: Vec<ShellPlacement>,
    bvh: BvhNode,
}

impl MultiscaleField {
    pub fn new(template: Arc<Template>, placements: Vec<ShellPlacement>) -> Result<Self> {
        if placements.is_empty() {
            return Err(Error::InfeasiblePacking("no placements".into()));
        }
        for p in &placements {
            p.validate()?;
        }
        check_disjoint(&placements)?;
        let mut order: Vec<usize> = (0..placements.len()).collect();
        let bvh = build_bvh(&placements, &mut order);
        Ok(Self {
            template,
            placements,
            bvh,
        })
    }

    /// Field value at an absolute point; at most one shell contributes.
    pub fn sample(&self, pt: [f64; 3]) -> SampleValue {
        let mut hit = None;
        query_bvh(&self.bvh, &self.placements, pt, &mut hit);
        match hit {
            None => SampleValue::ZERO,
            Some(n) => {
                let p = &self.placements[n];
                let local = numerics::mat_t_vec(
                    &p.rotation,
                    [
                        (pt[0] - p.center[0]) / p.scale,
                        (pt[1] - p.center[1]) / p.scale,
                        (pt[2] - p.center[2]) / p.scale,
                    ],
                );
                self.sample_in_shell(n, local)
            }
        }
    }

    /// Field of shell `n` at template coordinates `local`, evaluated without
    /// forming absolute positions (exact at every scale).
    pub fn sample_in_shell(&self, n: usize, local: [f64; 3]) -> SampleValue {
        let p = &self.placements[n];
        let v = self.template.sample(local);
        SampleValue {
            u: numerics::mat_vec(&p.rotation, [
                p.amplitude * v.u[0],
                p.amplitude * v.u[1],
                p.amplitude * v.u[2],
            ]),
            p: p.amplitude * p.amplitude * v.p,
            psi: p.amplitude * p.amplitude * v.psi,
        }
    }
}

fn build_bvh(placements: &[ShellPlacement], idx: &mut [usize]) -> BvhNode {
    if idx.len() == 1 {
        return BvhNode::Leaf(idx[0]);
    }
    // split on the axis with the largest center spread
    let mut best_axis = 0;
    let mut best_spread = -1.0;
    for axis in 0..3 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &k in idx.iter() {
            lo = lo.min(placements[k].center[axis]);
            hi = hi.max(placements[k].center[axis]);
        }
        if hi - lo > best_spread {
            best_spread = hi - lo;
            best_axis = axis;
        }
    }
    idx.sort_by(|&a, &b| {
        placements[a].center[best_axis].total_cmp(&placements[b].center[best_axis])
    });
    let mid = idx.len() / 2;
    let (l, r) = idx.split_at_mut(mid);
    let lo_max = l
        .iter()
        .map(|&k| placements[k].center[best_axis] + placements[k].scale)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi_min = r
        .iter()
        .map(|&k| placements[k].center[best_axis] - placements[k].scale)
        .fold(f64::INFINITY, f64::min);
    BvhNode::Split {
        axis: best_axis,
        lo: Box::new(build_bvh(placements, l)),
        hi: Box::new(build_bvh(placements, r)),
        lo_max,
        hi_min,
    }
}

fn query_bvh(
    node: &BvhNode,
    placements: &[ShellPlacement],
    pt: [f64; 3],
    hit: &mut Option<usize>,
) {
    if hit.is_some() {
        return;
    }
    match node {
        BvhNode::Leaf(k) => {
            let p = &placements[*k];
            let d2 = (pt[0] - p.center[0]).powi(2)
                + (pt[1] - p.center[1]).powi(2)
                + (pt[2] - p.center[2]).powi(2);
            if d2 < p.scale * p.scale {
                *hit = Some(*k);
            }
        }
        BvhNode::Split {
            axis,
            lo,
            hi,
            lo_max,
            hi_min,
        } => {
            if pt[*axis] <= *lo_max {
                query_bvh(lo, placements, pt, hit);
            }
            if pt[*axis] >= *hi_min {
                query_bvh(hi, placements, pt, hit);
            }
        }
    }
}

// -- norms, Hölder quotients, dissipation ---------------------------------------

/// Norm exponent: finite p or the sup convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormExponent {
    Finite(f64),
    Sup,
}

/// Scaling estimate of the W^{alpha,p} size of a placement family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormEstimate {
    pub alpha: f64,
    pub exponent: NormExponent,
    /// Partial value over the built shells.
    pub value: f64,
    /// Per-shell terms (U_n^p l_n^{3-p alpha}, or U_n l_n^{-alpha} for sup).
    pub terms: Vec<f64>,
    /// Geometric tail bound for the missing shells, when the terms decay.
    pub tail_bound: Option<f64>,
    /// The sequence grows without bound as shells accumulate.
    pub divergent: bool,
}

/// (sum_n U_n^p l_n^{3 - p alpha})^{1/p}, or sup_n U_n l_n^{-alpha}.
pub fn norm_estimate(
    placements: &[ShellPlacement],
    alpha: f64,
    exponent: NormExponent,
) -> NormEstimate {
    let terms: Vec<f64> = placements
        .iter()
        .map(|s| match exponent {
            NormExponent::Finite(p) => s.amplitude.powf(p) * s.scale.powf(3.0 - p * alpha),
            NormExponent::Sup => s.amplitude * s.scale.powf(-alpha),
        })
        .collect();
    let n = terms.len();
    let ratio = if n >= 2 && terms[n - 2] > 0.0 {
        terms[n - 1] / terms[n - 2]
    } else {
        0.0
    };
    match exponent {
        NormExponent::Finite(p) => {
            let sum: f64 = terms.iter().sum();
            let divergent = ratio >= 1.0;
            let tail_bound = if ratio > 0.0 && ratio < 1.0 {
                Some((sum + terms[n - 1] * ratio / (1.0 - ratio)).powf(1.0 / p))
            } else {
                None
            };
            NormEstimate {
                alpha,
                exponent,
                value: sum.powf(1.0 / p),
                terms,
                tail_bound,
                divergent,
            }
        }
        NormExponent::Sup => {
            let sup = terms.iter().cloned().fold(0.0_f64, f64::max);
            let divergent = ratio > 1.0 + 1e-12;
            NormEstimate {
                alpha,
                exponent,
                value: sup,
                terms,
                tail_bound: (!divergent).then_some(sup),
                divergent,
            }
        }
    }
}

/// Empirical Hölder diagnostics of a multiscale field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderReport {
    pub alpha: f64,
    pub seed: u64,
    /// Max within-shell quotient per scale, template-frame exact.
    pub per_scale: Vec<f64>,
    /// Max quotient over cross-shell pairs (representable scales only).
    pub cross_scale: f64,
    pub overall: f64,
}

/// Max of |u(x) - u(y)| / |x - y|^alpha over a deterministic pair sample.
///
/// Within-shell pairs reuse one canonical template-coordinate pair set, so
/// the per-scale quotients carry the exact U_n l_n^{-alpha} scaling law;
/// cross-shell pairs are formed for shells whose separation is representable
/// in absolute coordinates.
pub fn empirical_holder(
    field: &MultiscaleField,
    alpha: f64,
    pairs: usize,
    seed: u64,
) -> HolderReport {
    let pts = field.template.support_points(2 * pairs, seed);
    let mut per_scale = Vec::with_capacity(field.placements.len());
    let mut base_quotient: f64 = 0.0;
    for chunk in pts.chunks_exact(2) {
        let (a, b) = (chunk[0], chunk[1]);
        let (va, vb) = (field.template.sample(a), field.template.sample(b));
        let du = numerics::norm([va.u[0] - vb.u[0], va.u[1] - vb.u[1], va.u[2] - vb.u[2]]);
        let dx = numerics::norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
        if dx > 0.0 {
            base_quotient = base_quotient.max(du / dx.powf(alpha));
        }
    }
    for p in &field.placements {
        per_scale.push(p.amplitude * p.scale.powf(-alpha) * base_quotient);
    }

    // cross-shell pairs between consecutive representable shells
    let mut cross: f64 = 0.0;
    for w in 0..field.placements.len().saturating_sub(1) {
        let (a, b) = (&field.placements[w], &field.placements[w + 1]);
        let sep = numerics::norm([
            a.center[0] - b.center[0],
            a.center[1] - b.center[1],
            a.center[2] - b.center[2],
        ]);
        let coord_eps = 64.0 * f64::EPSILON * numerics::norm(a.center).max(1.0);
        if sep <= coord_eps {
            break;
        }
        for (&pa, &pb) in pts.iter().zip(pts.iter().rev()) {
            let va = field.sample_in_shell(w, pa);
            let vb = field.sample_in_shell(w + 1, pb);
            let xa = shell_point(a, pa);
            let xb = shell_point(b, pb);
            let du = numerics::norm([va.u[0] - vb.u[0], va.u[1] - vb.u[1], va.u[2] - vb.u[2]]);
            let dx = numerics::norm([xa[0] - xb[0], xa[1] - xb[1], xa[2] - xb[2]]);
            if dx > 0.0 {
                cross = cross.max(du / dx.powf(alpha));
            }
        }
    }
    let overall = per_scale.iter().cloned().fold(cross, f64::max);
    HolderReport {
        alpha,
        seed,
        per_scale,
        cross_scale: cross,
        overall,
    }
}

fn shell_point(p: &ShellPlacement, local: [f64; 3]) -> [f64; 3] {
    let world = numerics::mat_vec(&p.rotation, local);
    [
        p.center[0] + p.scale * world[0],
        p.center[1] + p.scale * world[1],
        p.center[2] + p.scale * world[2],
    ]
}

/// Local-dissipation residual u . grad(|u|^2/2 + p) of one shell at a probe
/// set, by centered differences with template-frame step h (physical step
/// l_n h). Returns (physical h, max residual) per step size.
pub fn shell_dissipation_study(
    field: &MultiscaleField,
    shell: usize,
    steps: &[f64],
    probes: usize,
    seed: u64,
) -> Vec<(f64, f64)> {
    let p = &field.placements[shell];
    let pts = field.template.support_points(probes, seed);
    // dissipation scale factor of the shell: U^3 / l
    let factor = p.amplitude.powi(3) / p.scale;
    steps
        .iter()
        .map(|&h| {
            let mut worst: f64 = 0.0;
            for &pt in &pts {
                let u = field.template.sample(pt).u;
                let mut d = 0.0;
                for axis in 0..3 {
                    let mut fwd = pt;
                    let mut bwd = pt;
                    fwd[axis] += h;
                    bwd[axis] -= h;
                    d += u[axis] * (field.template.bernoulli(fwd) - field.template.bernoulli(bwd))
                        / (2.0 * h);
                }
                worst = worst.max(d.abs());
            }
            (p.scale * h, factor * worst)
        })
        .collect()
}
