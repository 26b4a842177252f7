use thiserror::Error;

use crate::spin::Axis;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ensemble must contain at least one atom (got N = 0)")]
    EmptyEnsemble,

    #[error("network must contain at least {min} ensembles (got M = {got})")]
    TooFewEnsembles { min: usize, got: usize },

    #[error("state space of {amplitudes} amplitudes exceeds the oracle cap of {cap}")]
    SizeCap { amplitudes: u128, cap: usize },

    #[error("site {site} out of range for a network of {sites} ensembles")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("gate is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("moment table incomplete: missing {0}")]
    MissingMoment(String),

    #[error("mean spin along {axis:?} vanishes on site {site}; squeezing parameter diverges")]
    ZeroPolarization { site: usize, axis: Axis },

    #[error("collective polarization vanishes; squeezing parameter diverges")]
    ZeroCollectivePolarization,

    #[error("density matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid too coarse: eigenvalue drift {drift:e} under refinement exceeds {tolerance:e}")]
    Refinement { drift: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
