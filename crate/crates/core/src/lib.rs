//! Complex angular momentum analysis of state-to-state reactive scattering.
//!
//! The crate turns S-matrix elements sampled at integer total angular
//! momentum into a rational approximant that can be evaluated anywhere in
//! the complex J plane. From it the crate derives Regge poles, residues,
//! unfolded winding-angle amplitudes, nearside/farside and multi-rotation
//! decompositions of the amplitude, and closed-form resonance contributions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io_model;
pub mod pade_recon;
pub mod quadrature;
pub mod regge_analysis;
pub mod scattering;
pub mod special;
pub mod units;
pub mod workflow;

pub use error::{Error, Result};
pub use num_complex::Complex64;
