use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: requires {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("lead disturbance reached x = {x:.6} at t = {t:.6}, inside the last 2% of the domain (length {length})")]
    BoundaryReached { x: f64, t: f64, length: f64 },

    #[error("time step underflow at t = {t}: dt = {dt:e} (max rho = {max_rho})")]
    TimeStepUnderflow { t: f64, dt: f64, max_rho: f64 },

    #[error("root not bracketed: {0}")]
    NotBracketed(&'static str),

    #[error("quadrature failed to converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("asymptotic fire solve failed at x = {x}: {source}")]
    FireSolve {
        x: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("point (x = {x}, t = {t}) is {reason}")]
    Region { x: f64, t: f64, reason: &'static str },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("asymptotics window too small: {0}")]
    WindowTooSmall(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 1 usage/configuration, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
