//! Nearest matrix with a multiple eigenvalue, optionally constrained to a
//! complex-linear structure subspace.
//!
//! The distance is computed by eliminating the perturbation and the
//! eigenvalue in closed form and minimizing the remaining function over
//! orthonormal pairs of left/right eigenvector candidates.

pub mod error;
pub mod gallery;
pub mod heuristics;
pub mod linalg;
pub mod mtx;
pub mod objective;
pub mod random;
pub mod record;
pub mod roster;
pub mod solver;
pub mod source;
pub mod stiefel;
pub mod subspace;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
