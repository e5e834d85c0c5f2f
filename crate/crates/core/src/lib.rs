//! Exact verification of semigroup-indexed operator families on
//! finite-dimensional algebras, their induced family algebras, and the
//! associated cohomology and deformation theory.
//!
//! All arithmetic is over the rationals. Validators return a
//! [`report::Report`] naming the first failing instance; constructors return
//! [`error::Error`] when their inputs violate a precondition.

pub mod algebra_core;
pub mod catalog;
pub mod coalgebra_dual;
pub mod commands;
pub mod cohomology;
pub mod deformation;
pub mod error;
pub mod exact_linalg;
pub mod family_algebras;
pub mod family_ops;
pub mod report;
pub mod search;
pub mod semigroup;
pub mod workspace;
pub mod yang_baxter;

pub use error::{Error, Result};
pub use exact_linalg::{Matrix, Scalar, Tensor3};
pub use report::{Report, Violation};
