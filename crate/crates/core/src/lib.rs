//! Rabi spectroscopy of super-Bloch oscillations (SBOs) in a Floquet-driven
//! optical lattice clock.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the physical constants, configuration types and the
//!   Floquet-renormalised coefficients (hopping factor, sideband Rabi factor,
//!   dressed dispersion, generalised detuning).
//! * [`ensemble`] builds the thermal population over radial modes and
//!   quasi-momentum.
//! * [`spectroscopy`] evaluates single-mode lineshapes, thermal spectra,
//!   momentum-selective preparation and the two-pulse SBO protocol.
//! * [`metrology`] computes the Fisher information of the protocol, scans it
//!   over protocol parameters and converts the result into a gravity estimate.
//! * [`oracles`] contains independent reference machinery (quadrature,
//!   a time-domain two-level integrator, finite differences, an
//!   extended-precision Boltzmann sum). Nothing in the production path uses it.
//! * [`io`] parses run configurations, ships the parameter presets and
//!   drives the `sbo` command line tool.
//!
//! All energies are stored as frequencies in Hz (E/h), times in seconds and
//! quasi-momenta as dimensionless angles in (-π, π].

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod io;
pub mod metrology;
pub mod model;
mod numeric;
pub mod oracles;
pub mod spectroscopy;

pub use error::{Error, Result};
