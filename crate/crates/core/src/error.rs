use thiserror::Error;

/// Errors raised by state construction, quadrature, sampling and reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("diagonal is not on the probability simplex (sum {sum}, min entry {min})")]
    OffSimplex { sum: f64, min: f64 },

    #[error("correlation z{pair} = {value} lies outside [-1, 1]")]
    CorrelationOutOfRange { pair: &'static str, value: f64 },

    #[error("diagonal entry {index} is zero; xi is infinite")]
    ZeroDiagonal { index: usize },

    #[error("invalid principal minor: order {order}, index {index}")]
    InvalidMinor { order: usize, index: usize },

    #[error("not a density matrix (correlation matrix has min eigenvalue {min_eigenvalue})")]
    NotDensityMatrix { min_eigenvalue: f64 },

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("unknown curve `{0}`")]
    UnknownCurve(String),

    #[error("unknown separability test `{0}`")]
    UnknownTest(String),

    #[error("invalid curve expression: {0}")]
    InvalidCurveExpr(String),

    #[error("invalid power exponent {0} (expected 2 or 4)")]
    InvalidPower(u32),

    #[error("beta must be 1, 2 or 4 (got {0})")]
    InvalidBeta(u32),

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} after {evaluations} evaluations")]
    QuadratureFailed {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("low-discrepancy sequence supports at most {max} dimensions (requested {requested})")]
    DimensionOverflow { requested: usize, max: usize },

    #[error("sample budget exhausted: {accepted} of {requested} samples accepted after {raw} sequence points")]
    BudgetExhausted {
        accepted: u64,
        requested: u64,
        raw: u64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("artifact error: {0}")]
    Artifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
