//! Crate-wide error type.

use std::fmt;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by system construction, loop simulation, adaptation and
/// scenario execution.
#[derive(Debug, Clone)]
pub enum Error {
    /// Invalid transfer-function construction (zero leading denominator
    /// coefficient, non-finite coefficient, non-positive sample time, ...).
    InvalidSystem(String),
    /// Invalid signal construction or use.
    InvalidSignal(String),
    /// Signal sample rate does not match the system sample time.
    SampleRateMismatch { expected_hz: f64, actual_hz: f64 },
    /// Sample times of two systems being combined differ.
    SampleTimeMismatch { left: f64, right: f64 },
    /// A feedback interconnection has no causal solution.
    IllPosedLoop(String),
    /// Frequency outside the open interval (0, Nyquist).
    FrequencyOutOfRange { freq_hz: f64, nyquist_hz: f64 },
    /// A plant or filter that must be stable is not.
    UnstableSystem(String),
    /// Zero-phase inversion is impossible (e.g. numerator zero at z = 1).
    ZeroPhaseInversion(String),
    /// Invalid parameter value in a builder or configuration.
    InvalidParameter(String),
    /// A signal sample became non-finite during simulation.
    NonFiniteSample { signal: &'static str, index: usize },
    /// The convergence gate reported not strictly positive real.
    ConvergenceGateFailed(String),
    /// The regression problem is rank deficient and unregularized.
    RankDeficient(String),
    /// Batch adaptation diverged.
    AdaptationDiverged { iteration: usize, pes_rms: f64 },
    /// Configuration file parsing or validation failure.
    Config(String),
    /// File I/O failure, with the offending path.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSystem(msg) => write!(f, "invalid system: {msg}"),
            Error::InvalidSignal(msg) => write!(f, "invalid signal: {msg}"),
            Error::SampleRateMismatch {
                expected_hz,
                actual_hz,
            } => write!(
                f,
                "sample rate mismatch: system expects {expected_hz} Hz, signal has {actual_hz} Hz"
            ),
            Error::SampleTimeMismatch { left, right } => {
                write!(f, "sample time mismatch: {left} s vs {right} s")
            }
            Error::IllPosedLoop(msg) => write!(f, "ill-posed loop: {msg}"),
            Error::FrequencyOutOfRange {
                freq_hz,
                nyquist_hz,
            } => write!(
                f,
                "frequency {freq_hz} Hz outside (0, {nyquist_hz}) Hz"
            ),
            Error::UnstableSystem(msg) => write!(f, "unstable system: {msg}"),
            Error::ZeroPhaseInversion(msg) => write!(f, "zero-phase inversion failed: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonFiniteSample { signal, index } => {
                write!(f, "non-finite sample in `{signal}` at index {index}")
            }
            Error::ConvergenceGateFailed(msg) => {
                write!(f, "convergence gate failed: {msg}")
            }
            Error::RankDeficient(msg) => write!(f, "rank-deficient regression: {msg}"),
            Error::AdaptationDiverged { iteration, pes_rms } => write!(
                f,
                "adaptation diverged at iteration {iteration} (batch PES RMS {pes_rms:.3e})"
            ),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
