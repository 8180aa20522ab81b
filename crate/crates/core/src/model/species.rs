use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Planck constant, J s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Unified atomic mass unit, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Atomic mass of 87Sr in u.
pub const SR87_MASS_U: f64 = 86.908_877_5;
/// Magic wavelength of the Sr lattice, m.
pub const SR_LATTICE_WAVELENGTH: f64 = 813.43e-9;
/// Clock transition wavelength used for the spin-orbit phase, m.
pub const SR_CLOCK_WAVELENGTH: f64 = 698e-9;
/// Rounded lattice recoil of 87Sr used by the reference parameter sets, Hz.
pub const SR87_REFERENCE_RECOIL_HZ: f64 = 3441.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoilSource {
    /// `h / (2 M λ_L²)` from the mass and lattice wavelength.
    Derived,
    /// Externally supplied value.
    Override,
}

/// Clock atom together with the lattice and clock laser wavelengths.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomSpecies {
    mass_kg: f64,
    lambda_lattice_m: f64,
    lambda_clock_m: f64,
    recoil_hz: f64,
    recoil_source: RecoilSource,
}

impl AtomSpecies {
    pub fn new(mass_kg: f64, lambda_lattice_m: f64, lambda_clock_m: f64) -> Result<Self> {
        positive("species.mass_kg", mass_kg)?;
        positive("species.lambda_lattice_m", lambda_lattice_m)?;
        positive("species.lambda_clock_m", lambda_clock_m)?;
        Ok(Self {
            mass_kg,
            lambda_lattice_m,
            lambda_clock_m,
            recoil_hz: derived_recoil_hz(mass_kg, lambda_lattice_m),
            recoil_source: RecoilSource::Derived,
        })
    }

    /// Replace the derived recoil frequency by a supplied value.
    pub fn with_recoil_override(mut self, recoil_hz: f64) -> Result<Self> {
        positive("species.recoil_hz", recoil_hz)?;
        self.recoil_hz = recoil_hz;
        self.recoil_source = RecoilSource::Override;
        Ok(self)
    }

    /// 87Sr in an 813.43 nm lattice with the recoil derived from constants.
    pub fn sr87() -> Self {
        Self::new(
            SR87_MASS_U * ATOMIC_MASS_UNIT,
            SR_LATTICE_WAVELENGTH,
            SR_CLOCK_WAVELENGTH,
        )
        .expect("valid constants")
    }

    /// 87Sr with the rounded 3441 Hz recoil used by the reference parameter sets.
    pub fn sr87_reference() -> Self {
        Self::sr87()
            .with_recoil_override(SR87_REFERENCE_RECOIL_HZ)
            .expect("positive recoil")
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass_kg
    }

    pub fn lambda_lattice_m(&self) -> f64 {
        self.lambda_lattice_m
    }

    pub fn lambda_clock_m(&self) -> f64 {
        self.lambda_clock_m
    }

    /// Lattice recoil energy over h, Hz.
    pub fn recoil_hz(&self) -> f64 {
        self.recoil_hz
    }

    pub fn recoil_source(&self) -> RecoilSource {
        self.recoil_source
    }

    /// Recoil computed from the mass and lattice wavelength, ignoring any override.
    pub fn derived_recoil_hz(&self) -> f64 {
        derived_recoil_hz(self.mass_kg, self.lambda_lattice_m)
    }

    /// Spin-orbit coupling phase `Φ = π λ_L / λ_p`.
    pub fn soc_phase(&self) -> f64 {
        PI * self.lambda_lattice_m / self.lambda_clock_m
    }

    /// Mass implied by the active recoil frequency, `h / (2 E_r λ_L²)`.
    ///
    /// Equals [`mass_kg`](Self::mass_kg) unless the recoil is overridden.
    pub fn recoil_mass_kg(&self) -> f64 {
        PLANCK / (2.0 * self.recoil_hz * self.lambda_lattice_m * self.lambda_lattice_m)
    }
}

fn derived_recoil_hz(mass_kg: f64, lambda_lattice_m: f64) -> f64 {
    PLANCK / (2.0 * mass_kg * lambda_lattice_m * lambda_lattice_m)
}

pub(crate) fn positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite and > 0, got {value}")))
    }
}
