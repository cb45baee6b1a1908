use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("N = {n} is too small: a long-range interacting cycle needs N >= 5")]
    TooFewNodes { n: usize },

    #[error("m = {m} is below 2: m = 1 would duplicate the nearest-neighbour bonds")]
    RangeTooShort { m: usize },

    #[error(
        "m = {m} equals N/2 for N = {n}: the +m and -m bonds coincide (degenerate antipodal bond) \
         and every node would have degree 3"
    )]
    DegenerateAntipode { n: usize, m: usize },

    #[error("m = {m} exceeds floor((N-1)/2) = {max} for N = {n}")]
    RangeTooLong { n: usize, m: usize, max: usize },

    #[error("node index {index} out of range 1..={n}")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("time must be strictly positive, got {0}")]
    NonPositiveTime(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("N = {0} is odd; the antipodal asymmetry needs an even ring")]
    OddRing(usize),

    #[error("power-law fit window [{tmin}, {tmax}] holds {found} points, need at least {needed}")]
    EmptyWindow { tmin: f64, tmax: f64, found: usize, needed: usize },

    #[error("power-law fit needs positive values, found {value} at t = {t}")]
    NonPositiveValue { t: f64, value: f64 },

    #[error("expected {expected} stationary points, found {found}")]
    StationaryPointCount { expected: usize, found: usize },

    #[error("stationary point at theta = {theta} has zero curvature")]
    ZeroCurvature { theta: f64 },

    #[error("quadrature did not converge below relative change {tol} with {points} points")]
    QuadratureNotConverged { tol: f64, points: usize },

    #[error("invalid trap configuration: {0}")]
    InvalidTraps(String),

    #[error("trap strength must be positive, got {0}")]
    InvalidStrength(f64),
}
