use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric is singular or not positive definite at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("non-finite {what} at {point:?}")]
    NonFinite { what: &'static str, point: Vec<f64> },

    #[error("point {point:?} is not on the {surface} (off by {distance:e})")]
    Domain {
        surface: &'static str,
        point: Vec<f64>,
        distance: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("extrapolation needs at least {needed} samples, got {got}")]
    Arity { needed: usize, got: usize },

    #[error("mass {0:e} is too small to normalize the center of mass")]
    DegenerateMass(f64),

    #[error("inadmissible metric: {0}")]
    Inadmissible(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("incompatible request: {0}")]
    Incompatible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
