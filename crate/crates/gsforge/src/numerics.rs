//! Shared numeric kernels: Gauss-Legendre quadrature, RK4 steppers,
//! root bracketing, cumulative Simpson integration, log-log order fits and
//! small 3D rotation helpers.

use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn gl48() -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre(48))
}

/// Integrate a smooth function over [a, b] with a cached 48-point rule.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in gl48() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Classical RK4 for a scalar ODE y' = f(x, y) from `x0` to `x1` in `n` steps.
pub fn rk4<F: Fn(f64, f64) -> f64>(f: &F, x0: f64, y0: f64, x1: f64, n: usize) -> f64 {
    let h = (x1 - x0) / n as f64;
    let mut x = x0;
    let mut y = y0;
    for _ in 0..n {
        let k1 = f(x, y);
        let k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(x + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x += h;
    }
    y
}

/// Bisection to `tol` followed by two Newton polish steps.
///
/// `f` must be monotone increasing on [lo, hi] with f(lo) <= 0 <= f(hi);
/// `df` is its derivative.
pub fn bisect_newton<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        if hi - lo < tol {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut x = mid;
    for _ in 0..2 {
        let d = df(x);
        if d != 0.0 {
            let step = f(x) / d;
            let next = x - step;
            if next.is_finite() && next >= lo - tol && next <= hi + tol {
                x = next;
            }
        }
    }
    x
}

/// Cumulative integral of samples on a uniform grid, 4th-order accurate.
///
/// Returns I[j] ~ integral from node 0 to node j. Even nodes use composite
/// Simpson; odd nodes append a 3/8-type correction through the cubic fitted
/// to the surrounding samples.
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (values[0] + values[1]);
        return out;
    }
    // I[1] from the cubic through nodes 0..=3 (or quadratic when n == 3).
    if n >= 4 {
        out[1] = h / 24.0 * (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3]);
    } else {
        out[1] = h / 12.0 * (5.0 * values[0] + 8.0 * values[1] - values[2]);
    }
    // Every node chains from j - 2 by a Simpson pair; odd nodes start from
    // the cubic-accurate I[1].
    for j in 2..n {
        out[j] = out[j - 2] + h / 3.0 * (values[j - 2] + 4.0 * values[j - 1] + values[j]);
    }
    out
}

/// Least-squares slope of log(err) against log(h).
pub fn loglog_slope(hs: &[f64], errs: &[f64]) -> f64 {
    assert_eq!(hs.len(), errs.len());
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(errs)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Evenly spaced samples including both endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Rotation matrix taking the unit vector `from` onto the unit vector `to`
/// (Rodrigues formula; the degenerate antiparallel case picks a stable axis).
pub fn rotation_between(from: [f64; 3], to: [f64; 3]) -> [[f64; 3]; 3] {
    let c = dot(from, to);
    let v = cross(from, to);
    let s2 = dot(v, v);
    if s2 < 1e-24 {
        if c > 0.0 {
            return identity3();
        }
        // antiparallel: rotate by pi around any axis orthogonal to `from`
        let axis = if from[0].abs() < 0.9 {
            normalize(cross(from, [1.0, 0.0, 0.0]))
        } else {
            normalize(cross(from, [0.0, 1.0, 0.0]))
        };
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, el) in row.iter_mut().enumerate() {
                *el = 2.0 * axis[i] * axis[j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        return r;
    }
    let k = (1.0 - c) / s2;
    let vx = skew(v);
    let mut r = identity3();
    for i in 0..3 {
        for j in 0..3 {
            let vx2 = (0..3).map(|m| vx[i][m] * vx[m][j]).sum::<f64>();
            r[i][j] += vx[i][j] + k * vx2;
        }
    }
    r
}

pub fn identity3() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

fn skew(v: [f64; 3]) -> [[f64; 3]; 3] {
    [
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ]
}

pub fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn mat_t_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    ]
}

/// Max deviation of R^T R from the identity.
pub fn orthogonality_defect(m: &[[f64; 3]; 3]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let v = (0..3).map(|k| m[k][i] * m[k][j]).sum::<f64>();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // 48-point rule is exact through degree 95.
        let v = integrate(|x| x.powi(7) - 3.0 * x.powi(2) + 1.0, -1.0, 2.0);
        // antiderivative: x^8/8 - x^3 + x
        let exact = (256.0 / 8.0 - 8.0 + 2.0) - (1.0 / 8.0 + 1.0 - 1.0);
        assert_relative_eq!(v, exact, max_relative = 1e-14);
    }

    #[test]
    fn gl_integrates_smooth_transcendental() {
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI);
        assert_relative_eq!(v, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn rk4_order() {
        // y' = y, y(0) = 1 -> e
        let e1 = (rk4(&|_, y| y, 0.0, 1.0, 1.0, 16) - std::f64::consts::E).abs();
        let e2 = (rk4(&|_, y| y, 0.0, 1.0, 1.0, 32) - std::f64::consts::E).abs();
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn bisect_newton_finds_root() {
        let r = bisect_newton(|x| x * x - 2.0, |x| 2.0 * x, 0.0, 2.0, 1e-12);
        assert_relative_eq!(r, std::f64::consts::SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn cumulative_integral_exact_on_cubics() {
        let h = 0.1;
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * h).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| x * x * x - x + 2.0).collect();
        let integral = cumulative_integral(&vals, h);
        for (j, &x) in xs.iter().enumerate() {
            let exact = x.powi(4) / 4.0 - x * x / 2.0 + 2.0 * x;
            assert_relative_eq!(integral[j], exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn cumulative_integral_fourth_order_on_sin() {
        let err_at = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let vals: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
            let integral = cumulative_integral(&vals, h);
            (0..n)
                .map(|j| (integral[j] - (1.0 - (j as f64 * h).cos())).abs())
                .fold(0.0_f64, f64::max)
        };
        let (e1, e2) = (err_at(51), err_at(101));
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "observed order {order}");
    }

    #[test]
    fn slope_recovers_exact_power() {
        let hs = [0.1, 0.05, 0.025];
        let errs: Vec<f64> = hs.iter().map(|h| 3.0 * h * h).collect();
        assert_relative_eq!(loglog_slope(&hs, &errs), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn rotation_aligns_and_is_orthogonal() {
        let from = normalize([0.0, 0.0, 1.0]);
        let to = normalize([1.0, 2.0, -0.5]);
        let r = rotation_between(from, to);
        let img = mat_vec(&r, from);
        for i in 0..3 {
            assert_relative_eq!(img[i], to[i], epsilon = 1e-12);
        }
        assert!(orthogonality_defect(&r) < 1e-12);
    }

    #[test]
    fn rotation_handles_antiparallel() {
        let r = rotation_between([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]);
        let img = mat_vec(&r, [0.0, 0.0, 1.0]);
        assert_relative_eq!(img[2], -1.0, epsilon = 1e-12);
        assert!(orthogonality_defect(&r) < 1e-12);
    }
}
