use thiserror::Error;

use crate::runner::parse::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate spectrum: qubit {k} at {freq_a} and qubit {k_other} at {freq_b} are indistinguishable")]
    Degenerate {
        k: usize,
        k_other: usize,
        freq_a: f64,
        freq_b: f64,
    },

    #[error("basis index {alpha} out of range for {dim} states")]
    IndexOutOfRange { alpha: usize, dim: usize },

    #[error("qubit {k} out of range for a chain of {n}")]
    QubitOutOfRange { k: usize, n: usize },

    #[error("offsets (mu={mu}, nu={nu}) are not realizable on qubit {k}")]
    InvalidOffsets { k: usize, mu: i32, nu: i32 },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("register must have {expected} qubits, got {got}")]
    WrongRegisterSize { expected: usize, got: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("integration step underflow: dt = {dt:e} for a pulse of duration {duration}")]
    StepUnderflow { dt: f64, duration: f64 },

    #[error("integration diverged: norm drift {drift:e} at t = {t} (dt = {dt:e}, {steps} steps)")]
    Divergence {
        drift: f64,
        t: f64,
        dt: f64,
        steps: usize,
    },

    #[error("step-halving check failed: max amplitude difference {diff:e} exceeds {tol:e}")]
    NotConverged { diff: f64, tol: f64 },

    #[error("oracle supports at most {max} qubits, got {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
