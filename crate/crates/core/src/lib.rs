//! Block Macaulay matrix solver for zero-dimensional polynomial systems and
//! rectangular multiparameter eigenvalue problems.

pub mod basis;
pub mod bench;
pub mod database;
pub mod error;
pub mod format;
pub mod generate;
pub mod linalg;
pub mod macaulay;
pub mod problem;
pub mod profile;
pub mod qz;
pub mod realization;
pub mod solver;
pub mod subspace;

pub use basis::{BasisId, Exponent, OrderId};
pub use error::{Error, Result};
pub use problem::{Problem, ProblemKind};
