use num_complex::Complex64;
use thiserror::Error;

/// Library-wide error type.
///
/// `Domain` covers invalid inputs (coincident nodes, forbidden parameter
/// combinations), `Inconsistency` covers violated internal identities that
/// indicate a bug rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("coincident nodes xi[{i}] = xi[{j}] = {value}")]
    CoincidentNodes { i: usize, j: usize, value: Complex64 },

    #[error("matrix S is singular (Delta = {delta}); basis solution undefined")]
    SingularS { delta: Complex64 },

    #[error("evaluation at pole lambda = {0}")]
    Pole(Complex64),

    #[error("polynomial has a repeated root near {0}")]
    RepeatedRoot(Complex64),

    #[error("common root of a polynomial row pair near {0}")]
    CommonRowRoot(Complex64),

    #[error("non-generic point: {0}")]
    NonGenericPoint(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("the A-case problem is not uniquely solvable at t0 = t0*")]
    NonUnique,

    #[error("internal consistency violated: {0}")]
    Inconsistency(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
