//! Estimates of the dual quantum Gromov–Hausdorff distance between
//! finite-dimensional Lip-von Neumann algebras, plus a truncated free scalar
//! field for probing continuity in the mass.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod freefield;
pub mod ghdist;
pub mod linalg;
pub mod lipnorms;
pub mod nets;

pub use algebra::{AlgebraElement, FiniteVNAlgebra};
pub use error::{Error, Result};
