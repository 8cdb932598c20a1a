use thiserror::Error;

use crate::quantum::BellDiagonalState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unphysical state: eigenvalue {min_eigenvalue:e} below tolerance -{tolerance:e}")]
    UnphysicalState { min_eigenvalue: f64, tolerance: f64 },

    #[error("coefficient c{index} = {value} outside [-1, 1]")]
    CoefficientOutOfRange { index: usize, value: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace {trace} differs from 1")]
    TraceNotOne { trace: f64 },

    #[error("state left the Bell-diagonal family (off-family component {residual:e})")]
    NotBellDiagonal { residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("flip probability {p} outside [0, 2]")]
    WeightOutOfRange { p: f64 },

    #[error(
        "closed-form map disagrees with operator-sum engine by {deviation:e} \
         (state {state:?}, sweep value {sweep_value}, x = {x})"
    )]
    Mismatch {
        deviation: f64,
        state: BellDiagonalState,
        sweep_value: f64,
        x: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
