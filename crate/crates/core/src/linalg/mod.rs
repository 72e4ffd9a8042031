//! Dense complex linear algebra.
//!
//! Everything here is sized for the problems in this crate: 3x3 and 5x5
//! drift matrices on the physics path, and Liouvillians with at most a few
//! thousand rows on the oracle path. There is no sparse machinery.

mod eigen;
mod expm;
mod kernel;
mod lu;
mod matrix;

pub use eigen::{eigenpairs, eigenvalues, schur, spectral_abscissa, Schur};
pub use expm::{expm, expm_apply};
pub use kernel::null_vector;
pub use lu::{solve_linear, Lu};
pub use matrix::{CMatrix, CVector};
