//! Cantor-like sets at finite depth, their coarse-grained measure,
//! ν-dimension, integral staircase and characteristic function.

mod measure;
mod set;
mod staircase;

use thiserror::Error;

pub use measure::{
    coarse_measure, estimate_dimension, measure_limit, DimensionEstimate, MeasureLimit,
    MeasureProfile,
};
pub use set::{indicator, FractalSet, Interval};
pub use staircase::{
    characteristic, characteristic_with_amplitude, Interior, Normalization, Staircase,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CantorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate interval [{c}, {d}]")]
    DegenerateInterval { c: f64, d: f64 },
    #[error("window [{c}, {d}] leaves the bounds [{lo}, {hi}]")]
    OutOfBounds { c: f64, d: f64, lo: f64, hi: f64 },
    #[error("the set does not meet [{c}, {d}]")]
    EmptyWindow { c: f64, d: f64 },
    #[error("measure does not decay for any gamma <= 1")]
    NoTransition,
}

/// `Γ(γ + 1)`.
pub fn gamma_factor(gamma: f64) -> f64 {
    libm::tgamma(gamma + 1.0)
}
