use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GromovError {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("triangle inequality violated at ({i}, {j}, {k}): d({i},{k}) = {lhs} > d({i},{j}) + d({j},{k}) = {rhs}")]
    Triangle { i: usize, j: usize, k: usize, lhs: f64, rhs: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cross matrix is not admissible: {0}")]
    Inadmissible(String),

    #[error("chain is not Cauchy: {0}")]
    NotCauchy(String),

    #[error(transparent)]
    Core(#[from] rdl_core::Error),
}

pub type Result<T> = std::result::Result<T, GromovError>;
