use serde::Serialize;

use crate::model::species::PLANCK;
use crate::model::AtomSpecies;
use crate::{Error, Result};

/// Gravity inferred from the static-force frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GravityResult {
    /// `(n + Δ) ν_s`, Hz.
    pub force_freq_hz: f64,
    /// m/s².
    pub g_value: f64,
    /// `δg/g`.
    pub rel_uncertainty: f64,
}

/// Force frequency `M g λ_L / (2h)` produced by gravity `g`.
///
/// The mass is the one implied by the active recoil frequency, so this is
/// `(g/λ_L) / (4 E_r/h)` whether the recoil is derived or overridden.
pub fn force_frequency_for_gravity(species: &AtomSpecies, g_value: f64) -> f64 {
    g_value * species.recoil_mass_kg() * species.lambda_lattice_m() / (2.0 * PLANCK)
}

/// Gravity from a measured SBO frequency `Δν_s` at drive `ν_s` and resonance `n`.
pub fn gravity_convert(
    species: &AtomSpecies,
    n_res: i32,
    delta_nu_hz: f64,
    nu_s_hz: f64,
    uncertainty_hz: f64,
) -> Result<GravityResult> {
    if n_res < 1 {
        return Err(Error::config("drive.n_res", format!("must be >= 1, got {n_res}")));
    }
    if !(nu_s_hz.is_finite() && nu_s_hz > 0.0) {
        return Err(Error::config("drive.nu_s_hz", "must be > 0"));
    }
    if !(uncertainty_hz.is_finite() && uncertainty_hz >= 0.0) {
        return Err(Error::config("uncertainty_hz", "must be finite and >= 0"));
    }
    let force_freq_hz = n_res as f64 * nu_s_hz + delta_nu_hz;
    let g_value = 2.0 * PLANCK * force_freq_hz / (species.recoil_mass_kg() * species.lambda_lattice_m());
    Ok(GravityResult {
        force_freq_hz,
        g_value,
        rel_uncertainty: uncertainty_hz / force_freq_hz,
    })
}
