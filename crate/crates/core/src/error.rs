use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("range {range} m to landmark {landmark} is below the admissible minimum {min} m")]
    RangeTooSmall { landmark: usize, range: f64, min: f64 },

    #[error("integration failed: {0}")]
    IntegrationFailure(String),

    #[error("filter diverged at t = {t} s (state entry {index} = {value})")]
    DivergenceDetected { t: f64, index: usize, value: f64 },

    #[error("innovation covariance is numerically singular")]
    SingularInnovation,

    #[error("degenerate landmark geometry: {0}")]
    DegenerateGeometry(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
