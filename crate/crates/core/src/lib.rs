//! Strict deformation quantization of the torus by translations, and the
//! deformation of classical states along it.
//!
//! The undeformed algebra is the algebra of trigonometric polynomials on
//! `T^{2n}` ([`lattice`]). A symplectic form and a compatible metric
//! ([`frame`]) determine the deformed product ([`product`]), the Gaussian
//! smoothing operator `S_ℏ` ([`smoothing`]), the deformed states
//! `ω_ℏ = ω ∘ S_ℏ` ([`states`]) and the norm and continuity checks on the
//! resulting field of C*-algebras ([`field`]). The [`oracle`] module evaluates
//! the defining integrals numerically and independently of all closed forms.

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod frame;
pub mod lattice;
pub(crate) mod linalg;
pub mod oracle;
pub mod product;
pub mod report;
pub mod smoothing;
pub mod states;
pub mod suites;

#[doc(hidden)]
pub mod cli;

pub use error::{DeformError, Result};
pub use frame::{CompatibleFrame, DeformationData, Metric, SymplecticForm};
pub use lattice::{FourierElement, LatticeIndex, SeminormSpec};
pub use report::VerificationReport;

pub use num_complex::Complex64;

/// Crate version embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
