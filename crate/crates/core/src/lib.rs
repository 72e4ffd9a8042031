//! Effective master-equation dynamics of bosonic modes coupled to a bath of
//! coherently driven, lossy two-level systems.
//!
//! The crate is layered:
//!
//! * [`linalg`]: a small dense complex kernel.
//! * [`bath`]: Bloch steady states and power spectral densities per TLS.
//! * [`rates`]: the effective master-equation rates, plus [`limits`] with
//!   closed forms used as independent checks.
//! * [`dynamics`]: the single-mode moment system, stability, squeezing and
//!   first-order coherence.
//! * [`oracle`]: exact density-matrix simulation on a truncated Fock space.
//! * [`validation`]: the acceptance suite, runnable from tests and the CLI.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the precision to `f64`, which is what the physics
//! needs at the parameter magnitudes of interest.

pub mod bath;
pub mod dynamics;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod oracle;
pub mod presets;
pub mod rates;
pub mod scalar;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::{Complex, Complex32, Complex64};

pub type ComplexMatrix = linalg::CMatrix<f64>;
pub type ComplexVector = linalg::CVector<f64>;
pub type ComplexMatrix32 = linalg::CMatrix<f32>;
pub type ComplexVector32 = linalg::CVector<f32>;
