//! Exact scalars, dense exact linear algebra, sparse multivariate
//! polynomials, and the Hasse-derivative calculus.

pub mod matrix;
pub mod poly;
pub mod scalar;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("frame basis is singular")]
    SingularFrame,
    #[error("cannot parse scalar: {0:?}")]
    BadScalar(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("denominator {0} is not invertible in the target field")]
    NonInvertibleDenominator(String),
}

pub use matrix::{nullspace_dimension, Matrix};
pub use poly::{frame_derivative, CoordinateFrame, Mult, MultiPoly};
pub use scalar::{is_prime, FieldDesc, Scalar};
