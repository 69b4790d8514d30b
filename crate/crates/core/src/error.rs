use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("catalog line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("expression `{expr}`: {msg}")]
    Expr { expr: String, msg: String },

    #[error("{space}: invariant violated on `{field}`: {detail}")]
    Invariant {
        space: String,
        field: &'static str,
        detail: String,
    },

    #[error("{space}: parameter {param}={value} outside range {range}")]
    OutOfRange {
        space: String,
        param: String,
        value: i64,
        range: String,
    },

    #[error("unknown space or family `{0}`")]
    UnknownSpace(String),

    #[error("{space}: unsupported: {reason}")]
    Unsupported { space: String, reason: String },

    #[error("metric is not positive definite: {0}")]
    InvalidMetric(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{space}: metric is not Einstein (residual {residual:e})")]
    NotEinstein { space: String, residual: f64 },

    #[error("{space}: check failed: {what}")]
    Assertion { space: String, what: String },

    #[error("flow stopped at t={t}: {what} (x = {x:?})")]
    Flow {
        t: f64,
        x: [f64; 3],
        what: &'static str,
    },

    #[error("oracle: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
