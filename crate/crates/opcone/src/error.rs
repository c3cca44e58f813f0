use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("input is not hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("not a state: {0}")]
    NotState(String),
    #[error("measure is not a probability measure: {0}")]
    NotProbability(String),
    #[error("measure is not unital: barycenter norm {0:.3e}")]
    NotUnital(f64),
    #[error("map is not unital: |T(1) - e| = {0:.3e}")]
    NotUnitalMap(f64),
    #[error("negative mass {mass:.3e} at atom {atom}")]
    NegativeAtom { atom: usize, mass: f64 },
    #[error("support invariant violated: {0}")]
    InvalidSupport(String),
    #[error("map is not positive: {0}")]
    NotPositive(String),
    #[error("support is not maximal (pointwise sum {worst_sum:.6}); T + e⊙q₀ is separable with ‖q₀‖ = {q0_total:.6}")]
    NotMaximal { worst_sum: f64, q0_total: f64, q0: Vec<(usize, f64)> },
    #[error("input lacks a certificate: {0}")]
    Uncertified(String),
    #[error("input refuted by the membership test: {0}")]
    Refuted(String),
    #[error("{0} is not an atom of the measure")]
    NotAnAtom(usize),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
