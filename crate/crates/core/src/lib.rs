//! Exact-arithmetic engine for integrable highest-weight modules of
//! symmetric quantized enveloping algebras, their tensor products, the
//! quasi-R-matrix, canonical bases of tensor products, and Yang-Baxter
//! verification.
//!
//! All computation happens over Z[v,v^-1] and Q(v); there is no floating
//! point anywhere, and every identity the crate claims is checked
//! structurally.

pub mod arith;
pub mod cartan;
pub mod error;
pub mod falgebra;
pub mod hwmodule;
pub mod linalg;
pub mod report;
pub mod rmatrix;
pub mod tensorcb;
pub mod theta;

pub use error::{Error, Result};
