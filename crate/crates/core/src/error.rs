use thiserror::Error;

use crate::delaunay::Family;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Delaunay parameters H={h}, B={b}: {reason}")]
    InvalidParams { h: f64, b: f64, reason: &'static str },

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("quadrature on [{a}, {b}] did not reach tolerance within {limit} subdivisions (error estimate {estimate:e})")]
    SubdivisionLimit { a: f64, b: f64, limit: usize, estimate: f64 },

    #[error("no sign change on [{a}, {b}]: f(a)={fa:e}, f(b)={fb:e}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("root finder hit the iteration limit ({limit}); last bracket [{lo}, {hi}]")]
    IterationLimit { limit: usize, lo: f64, hi: f64 },

    #[error("non-finite function value at x={x}")]
    NonFinite { x: f64 },

    #[error("z'(s) vanishes at s={s}; g is undefined there")]
    DzZero { s: f64 },

    #[error("operation requires a {expected} but the parameters describe a {actual}")]
    WrongFamily { expected: &'static str, actual: Family },

    #[error("B must be positive for this operation")]
    ZeroNeck,

    #[error("no orthogonal intersection: z(s0)={z_at_s0} < z0={z0}")]
    NoRoot { z_at_s0: f64, z0: f64 },

    #[error("could not bracket the root of g below r0={r0}")]
    BracketFailure { r0: f64 },

    #[error("portion leaves the ball: |beta(s)|^2={norm_sq} > R0^2={r0_sq} at s={s}")]
    EnclosureViolation { s: f64, norm_sq: f64, r0_sq: f64 },

    #[error("pinching gap {min_gap:e} at s={s} is negative on a portion expected to be pinched")]
    PinchingViolated { s: f64, min_gap: f64 },

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("violation search exceeded {cap} points")]
    ViolationSearchCap { cap: usize },
}
