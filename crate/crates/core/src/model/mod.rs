//! Physical constants, configuration types and the Floquet-renormalised
//! coefficients shared by every other module.

pub mod band;
pub mod bessel;
pub mod coefficients;
pub mod drive;
pub mod lattice;
pub mod pulse;
pub mod quadrature;
pub mod species;

pub use band::{dispersion, generalized_detuning, EffectiveModel, HoppingSource};
pub use bessel::bessel_j;
pub use coefficients::{hopping_factor, rabi_factor};
pub use drive::{DriveConfig, TabulatedWaveform, Waveform};
pub use lattice::{q_grid, thermal_hz, BoltzmannEnergy, LatticeEnsembleConfig};
pub use pulse::{PulseConfig, PulseLength};
pub use species::{AtomSpecies, RecoilSource};

/// Wrap an angle into (-π, π].
pub fn wrap_quasimomentum(q: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = (q + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_maps_into_half_open_zone() {
        assert_eq!(wrap_quasimomentum(PI), PI);
        assert_eq!(wrap_quasimomentum(-PI), PI);
        assert!((wrap_quasimomentum(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_quasimomentum(0.25), 0.25);
    }
}
