//! Structured 2D grids and scalar fields on them.

use crate::error::{Error, Result};

/// Uniform rectangular grid. For stream-function work it is centered: odd
/// node counts with node lines exactly on x = 0 and y = 0 (the gluing row).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Self {
        assert!(nx >= 2 && ny >= 2 && x_max > x_min && y_max > y_min);
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        }
    }

    /// Grid symmetric about both axes with node lines at x = 0 and y = 0.
    pub fn centered(x_half: f64, y_half: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx % 2 == 0 || ny % 2 == 0 || nx < 3 || ny < 3 {
            return Err(Error::GridNotCentered);
        }
        Ok(Self::new(-x_half, x_half, -y_half, y_half, nx, ny))
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.hx() * i as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + self.hy() * j as f64
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when a node row sits exactly on y = 0 and a column on x = 0.
    pub fn is_centered(&self) -> bool {
        self.nx % 2 == 1
            && self.ny % 2 == 1
            && (self.x_min + self.x_max).abs() < 1e-14 * self.hx()
            && (self.y_min + self.y_max).abs() < 1e-14 * self.hy()
    }

    /// Radius of the largest origin-centered disc inside the rectangle.
    pub fn inscribed_radius(&self) -> f64 {
        self.x_max
            .abs()
            .min(self.x_min.abs())
            .min(self.y_max.abs())
            .min(self.y_min.abs())
    }
}

/// Scalar samples on a [`Grid2D`]; NaN and infinities are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: Grid2D,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyField);
        }
        assert_eq!(values.len(), grid.len());
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.grid.idx(i, j);
        self.values[idx] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(())
    }

    /// Map (value, i, j) -> value.
    pub fn map_indexed<F: Fn(f64, usize, usize) -> f64>(&self, f: F) -> Self {
        let mut out = self.clone();
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                out.set(i, j, f(self.get(i, j), i, j));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_requires_odd_counts() {
        assert!(Grid2D::centered(1.0, 1.0, 100, 101).is_err());
        let g = Grid2D::centered(1.0, 2.0, 101, 201).unwrap();
        assert!(g.is_centered());
        assert_eq!(g.x(50), 0.0);
        assert_eq!(g.y(100), 0.0);
        assert_eq!(g.inscribed_radius(), 1.0);
    }

    #[test]
    fn field_rejects_nan() {
        let g = Grid2D::centered(1.0, 1.0, 3, 3).unwrap();
        let mut vals = vec![0.0; 9];
        vals[4] = f64::NAN;
        assert!(matches!(
            GridField::new(g, vals),
            Err(Error::NonFiniteValue(4))
        ));
    }

    #[test]
    fn indexing_round_trip() {
        let g = Grid2D::centered(1.0, 1.0, 5, 7).unwrap();
        let mut f = GridField::zeros(g);
        f.set(3, 6, 2.5);
        assert_eq!(f.get(3, 6), 2.5);
        assert_eq!(f.values()[6 * 5 + 3], 2.5);
    }
}
