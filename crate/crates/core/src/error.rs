use thiserror::Error;

use crate::amplitudes::AmplitudeError;
use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Amplitude(#[from] AmplitudeError),
    #[error("cutoff must be at least {min}, got {got}")]
    InvalidCutoff { min: usize, got: usize },
    #[error("dominant eigenvalue is degenerate: |λ1| = {largest:e}, |λ2| = {second:e}")]
    DegenerateDominant { largest: f64, second: f64 },
    #[error("level {level} is outside the half-line vector (cutoff {cutoff})")]
    Range { level: usize, cutoff: usize },
    #[error("occupation {0} is odd; only even occupations are allowed")]
    OddOccupation(u32),
    #[error("transition column {column} has no weight; the cutoff is too small")]
    ZeroColumn { column: usize },
    #[error("invalid state set: {0}")]
    InvalidStates(String),
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("every state is a death state")]
    EmptyAlive,
    #[error("chain never dies: spectral radius {spectral_radius} of the reduced matrix is not below 1")]
    ImmortalChain { spectral_radius: f64 },
    #[error("{check}: tolerance {tolerance:e} not met (observed {observed:e})")]
    ToleranceNotMet {
        check: String,
        tolerance: f64,
        observed: f64,
    },
    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
}
