//! Exact computation of quantum symmetric pair coideal subalgebras, their
//! quasi K-matrices and universal K-matrices for finite-type quantized
//! enveloping algebras, with operator-level verification on modules.

pub mod linalg;
pub mod rootdata;
pub mod freealg;
pub mod quasir;
pub mod qsp;
pub mod quasik;
pub mod invariants;
pub mod kmatrix;
pub mod repcat;
pub mod scalar;

pub use scalar::{Field, Poly, RatFunc, Scalar, ScalarError};
