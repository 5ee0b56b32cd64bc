//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series order must be at least {min}, got {got}")]
    OrderTooSmall { min: usize, got: usize },

    #[error("series has {len} coefficients but order {order} requires {}", order + 1)]
    CoefficientCount { len: usize, order: usize },

    #[error("radius estimate must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("evaluation at t = {t} outside validity radius {radius}")]
    OutOfRadius { t: f64, radius: f64 },

    #[error("series reciprocal undefined: constant term is zero")]
    ZeroConstantTerm,

    #[error("profiles degenerate: |a - b| = {gap:e} at phi = {phi}")]
    DegenerateProfiles { phi: f64, gap: f64 },

    #[error("phi = {phi} at (x, y) = ({x}, {y}) left the validity interval |phi| <= {eps}")]
    DomainExit { x: f64, y: f64, phi: f64, eps: f64 },

    #[error("P6 = {value:e} below tolerance at (x, phi) = ({x}, {phi}); domain violated")]
    NegativeP6 { x: f64, phi: f64, value: f64 },

    #[error("pi(phi) = {value:e} not positive at phi = {phi}; Y would not be monotone")]
    NonMonotoneY { phi: f64, value: f64 },

    #[error("y = {y} beyond resolved axis range (Y({eps}) = {y_max})")]
    AxisRangeExceeded { y: f64, y_max: f64, eps: f64 },

    #[error("phi * a(phi) = {value:e} at phi = {phi}; swirl would be imaginary")]
    SwirlImaginary { phi: f64, value: f64 },

    #[error("grid must contain a node row at y = 0 and a node column at x = 0 (odd nx, ny, symmetric extents)")]
    GridNotCentered,

    #[error("grid touches or crosses r = 0 (r_min = {0})")]
    GridTouchesAxis(f64),

    #[error("cutoff thresholds [{p_lo}, {p_hi}] invalid or outside attained pressure range [{attained_lo}, {attained_hi}]")]
    ThresholdsOutOfRange {
        p_lo: f64,
        p_hi: f64,
        attained_lo: f64,
        attained_hi: f64,
    },

    #[error("sampler query ({x}, {y}, {z}) outside the field grid and no cutoff applied")]
    SamplerOutOfRange { x: f64, y: f64, z: f64 },

    #[error("shells {i} and {j} overlap: |x_i - x_j| = {dist} < {required}")]
    OverlappingShells {
        i: usize,
        j: usize,
        dist: f64,
        required: f64,
    },

    #[error("helical packing infeasible: {0}")]
    InfeasiblePacking(String),

    #[error("exponent s = {0} outside (0, 1)")]
    InvalidExponent(f64),

    #[error("strip direction is parallel to gravity (k = 0 gives a vertical strip); rejected")]
    VerticalStrip,

    #[error("Newton iteration for gamma failed at tau = {tau}: {detail}")]
    GammaNewton { tau: f64, detail: String },

    #[error("discriminant {value:e} negative at (x2, tau) = ({x2}, {tau})")]
    NegativeDiscriminant { x2: f64, tau: f64, value: f64 },

    #[error("convergence study needs at least 3 spacings, got {0}")]
    TooFewRefinements(usize),

    #[error("residuals are not monotone in h: {0:?}")]
    NonMonotoneResiduals(Vec<f64>),

    #[error("field is empty")]
    EmptyField,

    #[error("field contains a non-finite value at index {0}")]
    NonFiniteValue(usize),

    #[error("unsupported export format: {0}")]
    UnsupportedFormat(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
