use thiserror::Error;

use crate::symexpr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("sampling region is empty after margins (coordinate `{0}`)")]
    EmptySamplingRegion(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("metric is singular: {0}")]
    SingularMetric(String),
    #[error("metric failed validation: {0}")]
    InvalidMetric(String),
    #[error("dimension error: expected {expected}, got {got}")]
    Dimension { expected: String, got: usize },
    #[error("metric is not axisymmetric: {0}")]
    NotAxisymmetric(String),
    #[error("Killing vector degenerates: {0}")]
    DegenerateKilling(String),
    #[error("conformal rescaling already applied")]
    AlreadyConformal,
    #[error("operation requires the conformally rescaled reduction")]
    NotConformal,
    #[error("path leaves the chart domain at vertex {0}")]
    PathOutsideDomain(usize),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("surface integral is not Cauchy in the radius: {0}")]
    NonDecayingMetric(String),
    #[error("energy density is not integrable at the axis: {0}")]
    NonIntegrableAxis(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("metric file line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
