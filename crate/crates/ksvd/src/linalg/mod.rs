//! Dense vectors and matrices, the operator abstraction, and the Jacobi
//! eigensolver used as the verification oracle.

pub mod dense;
pub mod jacobi;
pub mod operator;
pub mod vec;

pub use dense::{DenseMatrix, DenseSymMatrix};
pub use jacobi::{jacobi_eigh, Spectrum};
pub use operator::{
    deflated_operator, densify, matvec, CountingOperator, Deflated, DilationOperator,
    GramOperator, LinearOperator,
};
