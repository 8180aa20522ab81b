use num_complex::Complex64;

use super::coefficients::{hopping_factor, rabi_factor};
use super::drive::DriveConfig;
use super::lattice::LatticeEnsembleConfig;
use super::species::AtomSpecies;
use crate::Result;

/// Dressed lowest-band energy (over h) of radial level `s` at quasi-momentum `q`.
///
/// `-2 J(s) Re(𝓕₁ e^{-iq}) + ν_r (s + 1)`, which is `-2 J 𝓕₁ cos q + ν_r (s+1)`
/// for real `𝓕₁` and `-2 J |𝓕₁| cos(q - arg 𝓕₁) + ν_r (s+1)` in general.
pub fn dispersion(q: f64, s: u32, cfg: &LatticeEnsembleConfig, f1: Complex64) -> f64 {
    let hop = cfg.effective_hopping_hz(s) * (f1 * Complex64::from_polar(1.0, -q)).re;
    -2.0 * hop + cfg.nu_r_hz * (s as f64 + 1.0)
}

/// Generalised detuning `δ + m ν_s + (E(q + Φ) - E(q))/h` of sideband `m`.
///
/// Convenience form that evaluates `𝓕₁` from the drive on every call; hot
/// loops should go through [`EffectiveModel`].
pub fn generalized_detuning(
    q: f64,
    s: u32,
    m: i32,
    delta_hz: f64,
    drive: &DriveConfig,
    cfg: &LatticeEnsembleConfig,
    species: &AtomSpecies,
) -> Result<f64> {
    let f1 = hopping_factor(drive, species, 1)?;
    Ok(detuning_with(q, s, m, delta_hz, drive.nu_s_hz(), cfg, species.soc_phase(), f1))
}

#[allow(clippy::too_many_arguments)]
fn detuning_with(
    q: f64,
    s: u32,
    m: i32,
    delta_hz: f64,
    nu_s_hz: f64,
    cfg: &LatticeEnsembleConfig,
    phi: f64,
    f1: Complex64,
) -> f64 {
    let amplitude = 4.0 * cfg.effective_hopping_hz(s) * f1.norm() * (0.5 * phi).sin();
    let gauge = if f1.norm() > 0.0 { f1.arg() } else { 0.0 };
    delta_hz + m as f64 * nu_s_hz + amplitude * (q - gauge + 0.5 * phi).sin()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoppingSource {
    /// Period average of the drive.
    Computed,
    /// Supplied directly.
    Override,
}

/// Species, drive and lattice bundled with the resolved hopping factor 𝓕₁.
#[derive(Clone, Debug)]
pub struct EffectiveModel {
    species: AtomSpecies,
    drive: DriveConfig,
    lattice: LatticeEnsembleConfig,
    f1: Complex64,
    f1_source: HoppingSource,
}

impl EffectiveModel {
    pub fn new(species: AtomSpecies, drive: DriveConfig, lattice: LatticeEnsembleConfig) -> Result<Self> {
        lattice.validate()?;
        let f1 = hopping_factor(&drive, &species, 1)?;
        Ok(Self {
            species,
            drive,
            lattice,
            f1,
            f1_source: HoppingSource::Computed,
        })
    }

    /// Model whose hopping factor is fixed to `f1` instead of derived from the drive.
    pub fn with_hopping_factor(
        species: AtomSpecies,
        drive: DriveConfig,
        lattice: LatticeEnsembleConfig,
        f1: Complex64,
    ) -> Result<Self> {
        lattice.validate()?;
        if !(f1.re.is_finite() && f1.im.is_finite()) {
            return Err(crate::Error::config("drive.hopping_factor", "must be finite"));
        }
        Ok(Self {
            species,
            drive,
            lattice,
            f1,
            f1_source: HoppingSource::Override,
        })
    }

    pub fn species(&self) -> &AtomSpecies {
        &self.species
    }

    pub fn drive(&self) -> &DriveConfig {
        &self.drive
    }

    pub fn lattice(&self) -> &LatticeEnsembleConfig {
        &self.lattice
    }

    pub fn hopping_factor(&self) -> Complex64 {
        self.f1
    }

    pub fn hopping_source(&self) -> HoppingSource {
        self.f1_source
    }

    /// Same model with a different residual force `Δν_s`. 𝓕₁ does not depend on it.
    pub fn with_delta_nu(&self, delta_nu_hz: f64) -> Result<Self> {
        Ok(Self {
            drive: self.drive.with_delta_nu(delta_nu_hz)?,
            ..self.clone()
        })
    }

    /// Same model with a different lattice (the hopping factor is kept).
    pub fn with_lattice(&self, lattice: LatticeEnsembleConfig) -> Result<Self> {
        lattice.validate()?;
        Ok(Self {
            lattice,
            ..self.clone()
        })
    }

    pub fn soc_phase(&self) -> f64 {
        self.species.soc_phase()
    }

    /// Quasi-momentum offset `arg 𝓕₁` of the dressed band minimum.
    pub fn gauge_phase(&self) -> f64 {
        if self.f1.norm() > 0.0 {
            self.f1.arg()
        } else {
            0.0
        }
    }

    pub fn dispersion_hz(&self, q: f64, s: u32) -> f64 {
        dispersion(q, s, &self.lattice, self.f1)
    }

    /// Undriven band `-2 J cos q + ν_r (s+1)`.
    pub fn bare_dispersion_hz(&self, q: f64, s: u32) -> f64 {
        dispersion(q, s, &self.lattice, Complex64::new(1.0, 0.0))
    }

    /// `4 J(s) |𝓕₁| sin(Φ/2)`, the half-width of the q-dependent resonance shift.
    pub fn detuning_amplitude_hz(&self, s: u32) -> f64 {
        4.0 * self.lattice.effective_hopping_hz(s) * self.f1.norm() * (0.5 * self.soc_phase()).sin()
    }

    /// Generalised detuning `δ + m ν_s + 4 J |𝓕₁| sin(q - arg 𝓕₁ + Φ/2) sin(Φ/2)`.
    pub fn generalized_detuning_hz(&self, q: f64, s: u32, m: i32, delta_hz: f64) -> f64 {
        detuning_with(
            q,
            s,
            m,
            delta_hz,
            self.drive.nu_s_hz(),
            &self.lattice,
            self.soc_phase(),
            self.f1,
        )
    }

    pub fn rabi_factor(&self, m: i32) -> Result<Complex64> {
        rabi_factor(&self.drive, &self.species, m)
    }

    /// Effective coupling `g₀ |𝓡^m|` of sideband `m`.
    pub fn sideband_coupling_hz(&self, bare_hz: f64, m: i32) -> Result<f64> {
        Ok(bare_hz * self.rabi_factor(m)?.norm())
    }
}
