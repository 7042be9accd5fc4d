//! Spontaneous photon emission by paraxial twisted electrons in axisymmetric,
//! z-dependent magnetic fields.
//!
//! The electron state is built from the Ermakov envelope `b(z)` of the
//! transverse oscillator together with its Lewis and Larmor phases; the first
//! order emission amplitude is assembled from displacement-operator form
//! factors in the circular Fock basis and integrated along the interaction
//! region.
//!
//! Modules, bottom-up:
//! - [`units`]: lab parameters and the normalized unit system
//! - [`field`]: normalized axial field profiles
//! - [`ermakov`]: envelope and phase integration
//! - [`quantum`]: Fock-space matrix elements and spatial modes
//! - [`emission`]: amplitudes, angular spectra and total rates
//! - [`cli`]: configuration and command front end

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod emission;
pub mod ermakov;
pub mod error;
pub mod field;
pub mod quadrature;
pub mod quantum;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
