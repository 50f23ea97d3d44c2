//! Exact linear and lattice data of calibrated quantum fans.
//!
//! Fans live on a finitely generated subgroup Γ ⊂ R^d, possibly dense,
//! presented by a calibration h: Z^N → Γ. Coordinates are elements of
//! Q(α₁, …, α_m) for declared independent irrationals α_i.

pub mod calibration;
pub mod chart;
pub mod classical;
pub mod cone;
pub mod fan;
pub mod io;
pub mod linalg;
pub mod morphism;
pub mod report;
pub mod scalar;

pub use linalg::{IntMatrix, LinalgError, ScalarMatrix, ScalarVector};
pub use scalar::{IrrationalBasis, Scalar, ScalarError, ScalarField, Sign};
