//! Exact combinatorics and Monte-Carlo estimators for sum-rank metric codes
//! over small finite fields.
//!
//! The ambient space is M^ell, ell-tuples of m x eta matrices over F_q, with
//! weight the sum of the block ranks.

pub mod chains;
pub mod codes;
pub mod decomposable;
pub mod error;
pub mod fqlinalg;
pub mod galois;
pub mod logscale;
pub mod qcomb;
pub mod rng;
pub mod stats;
pub mod sumrank;

pub use codes::Code;
pub use decomposable::DecomposableSubspace;
pub use error::{Error, Result};
pub use fqlinalg::{MatrixFq, Subspace};
pub use galois::{field_build, FieldSpec, Fq};
pub use qcomb::{BigCount, SpaceParams};
pub use sumrank::{BallSpec, BlockTuple};
