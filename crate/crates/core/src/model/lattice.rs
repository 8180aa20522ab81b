use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::species::{positive, BOLTZMANN, PLANCK};

/// Which dispersion enters the Boltzmann factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoltzmannEnergy {
    /// Floquet-renormalised band, `-2 J 𝓕₁ cos q`.
    #[default]
    Dressed,
    /// Undriven band, `-2 J cos q`.
    Bare,
}

/// Lowest-band lattice with harmonic radial confinement at finite temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeEnsembleConfig {
    /// Nearest-neighbour hopping of the lowest band, `J^{n_z}/h`.
    pub j_nz_hz: f64,
    /// Radial coupling per quantum, `C^{ñ}/h = c_coeff (s + 1)`.
    pub c_coeff_hz: f64,
    pub nu_r_hz: f64,
    pub n_sites: usize,
    /// Largest radial quantum number `s = n_x + n_y` kept.
    pub s_max: u32,
    pub temperature_k: f64,
    /// Sign with which the radial coupling adds to the hopping, ±1.
    pub coupling_sign: i8,
    pub boltzmann_energy: BoltzmannEnergy,
}

impl LatticeEnsembleConfig {
    /// Validated configuration with `coupling_sign = +1` and dressed Boltzmann energies.
    pub fn new(
        j_nz_hz: f64,
        c_coeff_hz: f64,
        nu_r_hz: f64,
        n_sites: usize,
        s_max: u32,
        temperature_k: f64,
    ) -> Result<Self> {
        let cfg = Self {
            j_nz_hz,
            c_coeff_hz,
            nu_r_hz,
            n_sites,
            s_max,
            temperature_k,
            coupling_sign: 1,
            boltzmann_energy: BoltzmannEnergy::Dressed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.j_nz_hz.is_finite() {
            return Err(Error::config("lattice.j_nz_hz", "must be finite"));
        }
        if !self.c_coeff_hz.is_finite() {
            return Err(Error::config("lattice.c_coeff_hz", "must be finite"));
        }
        if !self.nu_r_hz.is_finite() || self.nu_r_hz < 0.0 {
            return Err(Error::config("lattice.nu_r_hz", "must be finite and >= 0"));
        }
        if self.n_sites < 2 {
            return Err(Error::config(
                "lattice.n_sites",
                format!("must be >= 2, got {}", self.n_sites),
            ));
        }
        positive("lattice.temperature_k", self.temperature_k)?;
        if self.coupling_sign != 1 && self.coupling_sign != -1 {
            return Err(Error::config(
                "lattice.coupling_sign",
                format!("must be +1 or -1, got {}", self.coupling_sign),
            ));
        }
        // J(s) is linear in s, so checking both ends covers the range
        for s in [0, self.s_max] {
            let j = self.effective_hopping_hz(s);
            if !(j > 0.0) {
                return Err(Error::config(
                    "lattice.c_coeff_hz",
                    format!("effective hopping J(s={s}) = {j} Hz must stay > 0"),
                ));
            }
        }
        Ok(())
    }

    /// `J^{ñ}/h = J^{n_z}/h ± c_coeff (s + 1)`.
    pub fn effective_hopping_hz(&self, s: u32) -> f64 {
        self.j_nz_hz + self.coupling_sign as f64 * self.c_coeff_hz * (s as f64 + 1.0)
    }

    /// `k_B T / h` in Hz.
    pub fn thermal_hz(&self) -> f64 {
        thermal_hz(self.temperature_k)
    }

    /// Radial cutoff where `exp(-ν_r s h / k_B T)` has fallen below 1e-6.
    pub fn default_s_max(nu_r_hz: f64, temperature_k: f64) -> u32 {
        let ratio = thermal_hz(temperature_k) / nu_r_hz;
        (1e6_f64.ln() * ratio).ceil() as u32
    }

    /// Quasi-momentum grid `q_j = -π + 2π j / N`, `j = 1..=N`.
    pub fn q_grid(&self) -> Vec<f64> {
        q_grid(self.n_sites)
    }
}

pub fn thermal_hz(temperature_k: f64) -> f64 {
    BOLTZMANN * temperature_k / PLANCK
}

/// Right-inclusive grid on (-π, π].
pub fn q_grid(n_sites: usize) -> Vec<f64> {
    let n = n_sites as f64;
    (1..=n_sites)
        .map(|j| -std::f64::consts::PI + std::f64::consts::TAU * j as f64 / n)
        .collect()
}
