//! Mode-overlap calculus for quantum fields seen from superposed noninertial frames.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: complex Γ, Kummer M, Gauss ₂F₁ and conical Legendre functions.
//! * [`quad`]: double-exponential and Gauss–Legendre quadrature.
//! * [`oscint`]: brute-force oracles (Klein–Gordon products, smeared overlaps).
//! * [`rindler`] and [`diamond`]: closed-form Bogoliubov coefficients and kinematics.
//! * [`superpose`]: branch assembly, truncated Fock states and thermality fits.
//! * [`detectors`]: Unruh–DeWitt responses and KMS diagnostics.
//!
//! Natural units c = ħ = k_B = 1 are used throughout.

pub mod dd;
pub mod detectors;
pub mod diamond;
pub mod error;
pub mod oscint;
pub mod quad;
pub mod rindler;
pub mod specfun;
pub mod superpose;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default relative tolerance shared by every numerical routine.
pub const DEFAULT_TOL: f64 = 1e-10;
