use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid coordinates: {0}")]
    InvalidPoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no closed-form kernel for {0}")]
    NoKernel(String),

    #[error("quadrature did not converge on [{a}, {b}]: estimate {value}, error {error}")]
    Quadrature { a: f64, b: f64, value: f64, error: f64 },

    #[error("kernel mass {mass} outside tolerance (expected 1)")]
    NotNormalized { mass: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("CFL condition violated: dt = {dt} exceeds {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("estimator did not converge: {0}")]
    NotConverged(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("unknown profile label '{0}'")]
    UnknownProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
