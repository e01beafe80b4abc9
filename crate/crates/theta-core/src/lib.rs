//! Exact-arithmetic engine for rank-one representation computations:
//! shifted Yangians and quantum loop algebras at sl2, their S-series,
//! T-operators, Theta series, monodromy matrices and R-matrices, all as
//! truncated operator-valued series over exact scalar rings.

pub mod arith;
pub mod cartan;
pub mod error;
pub mod lweight;
pub mod report;
pub mod window;
pub mod yangian;

pub use error::{Error, Result};
