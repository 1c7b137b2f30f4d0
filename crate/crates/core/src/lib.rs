pub mod approximation;
pub mod cli;
pub mod error;
pub mod expressiveness;
pub mod linalg;
pub mod logic;
pub mod net_compiler;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Arbitrary-precision rational.
pub type Rational = num_rational::BigRational;
pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type ExactMatrix = linalg::Matrix<Rational>;
pub type Operator64 = linalg::LinearOperator<f64>;
pub type ExactOperator = linalg::LinearOperator<Rational>;
