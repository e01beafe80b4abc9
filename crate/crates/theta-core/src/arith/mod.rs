//! Exact scalar rings and the series/matrix layers built on them.

pub mod linalg;
pub mod mpoly;
pub mod opseries;
pub mod qnum;
pub mod qrat;
pub mod rat;
pub mod scalar;
pub mod series;
pub mod sparse;

pub use mpoly::{MPoly, Var};
pub use opseries::OpSeries;
pub use qrat::QRat;
pub use rat::Rat;
pub use scalar::Scalar;
pub use series::{SVar, Series};
pub use sparse::SpMat;
