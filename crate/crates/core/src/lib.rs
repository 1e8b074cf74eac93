//! Entanglement entropy of a screened two-body problem mapped onto a
//! four-dimensional radial oscillator.
//!
//! The pipeline runs `params -> basis -> matelem -> perturbation -> rdm ->
//! entropy`, and [`oracle`] re-derives every closed form by brute force
//! (truncated-basis diagonalization, direct quadrature, finite differences).

pub mod basis;
pub mod entropy;
pub mod error;
pub mod matelem;
pub mod oracle;
pub mod params;
pub mod perturbation;
pub mod rdm;
pub mod run;
pub mod specfn;

pub use error::{Error, Result};
pub use params::{beta_series, derive_scales, HarmonicScales, PhysicalParams};
