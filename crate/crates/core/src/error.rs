use thiserror::Error;

use crate::minimizer::SpreadingReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("tridiagonal factorization broke down at row {row}")]
    SingularSystem { row: usize },

    #[error("s = {s} lies outside the tabulated range [{lo}, {hi}]")]
    OutsideTable { s: f64, lo: f64, hi: f64 },

    #[error("degenerate frequency window: m1 = {m1} is not below m0 = {m0}")]
    DegenerateWindow { m1: f64, m0: f64 },

    #[error("empty retraction: constraint value is {0}")]
    EmptyRetraction(f64),

    #[error("constraint gradient vanishes identically")]
    ZeroConstraintGradient,

    #[error("no ground state detected: {0}")]
    NoGroundState(String),

    #[error("no bound state at this (q, sigma2, W): {}", .0.reason)]
    NoBoundState(Box<SpreadingReport>),

    #[error("descent diverged: {0}")]
    Diverged(String),

    #[error("not converged after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("velocity |v| = {0} must be below 1")]
    Superluminal(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
