//! Exact computations with Z-graded rings that have non-degenerate products,
//! and Tate cohomology rings of finite-dimensional local symmetric algebras
//! over prime fields.

pub mod cli;
pub mod duality;
pub mod error;
pub mod exactlin;
pub mod gallery;
pub mod graded;
pub mod report;
pub mod stmod;
pub mod structure;

pub use error::{Error, Result};
