use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("insufficient order: need {needed}, have {have}")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("scale guard: estimated {estimate} candidates exceeds limit {limit}")]
    ScaleGuard { estimate: u128, limit: u128 },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
