//! Dense linear algebra: matrices, SVD, elimination, and the operator type
//! carrying rank/null-space/aliasing diagnostics.

pub mod exact;
pub mod io;
mod matrix;
mod operator;
mod svd;

pub use matrix::{dot, norm2, Matrix, MatrixRecord};
pub use operator::{LinearOperator, NullSpaceBasis, ALIAS_TOL, DEFAULT_RANK_TOL};
pub use svd::Svd;
