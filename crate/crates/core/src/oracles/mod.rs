//! Independent reference computations used to check the production path.
//!
//! None of the production modules call into here. Each routine takes a
//! deliberately different numerical route from its production counterpart:
//! Romberg integration instead of Gauss–Legendre, explicit time evolution
//! instead of Floquet averaging, finite differences instead of the analytic
//! chain rule, and double-double accumulation instead of plain sums.

mod boltzmann;
mod finite_diff;
mod quadrature;
mod two_level;

pub use boltzmann::{boltzmann_weights_reference, DoubleDouble};
pub use finite_diff::{finite_difference, FdEstimate};
pub use quadrature::{coefficient_phase, quad_coefficient, romberg, PhaseKind, QuadEstimate};
pub use two_level::{
    evolve_two_level, fit_rabi_frequency, PhaseModulation, TwoLevelSim, TwoLevelTrace,
};
