//! Construction and numerical verification of smooth, compactly supported
//! steady flows: axisymmetric 3D Euler equilibria built from a localizable
//! Grad-Shafranov system, their multiscale Hölder-rough superpositions, and
//! the matching 2D Boussinesq and porous-medium constructions.
//!
//! Pipeline, bottom to top:
//!
//! * [`profiles`] — power-series solution of the rescaled profile ODEs.
//! * [`geometry`] — the polynomials P2/P3/P6, the characteristic boundary
//!   curve, the axis profile, and the hodograph domain.
//! * [`stream`] — the stream function on a grid near the degenerate point.
//! * [`euler`] — dimensional velocity/pressure/vorticity assembly.
//! * [`localization`] — pressure cutoffs, the compact template, and
//!   multiscale shell superpositions with norm and Hölder diagnostics.
//! * [`boussinesq`], [`ipm`] — the two companion 2D systems.
//! * [`verifier`] — finite-difference residual checks and convergence-order
//!   studies shared by everything above.
//! * [`config`], [`runner`], [`io`] — the CLI surface and export formats.

pub mod boussinesq;
pub mod config;
pub mod cutoff;
pub mod error;
pub mod euler;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod ipm;
pub mod localization;
pub mod numerics;
pub mod profiles;
pub mod runner;
pub mod scalar;
pub mod series;
pub mod stream;
pub mod verifier;

pub use error::{Error, Result};
pub use scalar::{Rational, Real};
pub use series::TruncatedSeries;

/// Truncated series over the default scalar.
pub type RealSeries = TruncatedSeries<Real>;
/// Truncated series over exact rationals.
pub type RationalSeries = TruncatedSeries<Rational>;
