use super::band::EffectiveModel;
use crate::{Error, Result};

/// How long a clock pulse lasts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PulseLength {
    Fixed(f64),
    /// `0.5 / g_eff` of the pulse's own sideband.
    Pi,
}

/// Rectangular clock pulse addressing Floquet sideband `sideband`.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseConfig {
    /// Laser detuning δ, Hz.
    pub detuning_hz: f64,
    /// Effective Rabi frequency on `sideband`, Hz.
    pub g_eff_hz: f64,
    pub duration_s: f64,
    pub sideband: i32,
    /// Bare Rabi frequency g₀, when known. Needed to evaluate the same laser
    /// on other sidebands.
    pub bare_hz: Option<f64>,
}

impl PulseConfig {
    pub fn new(detuning_hz: f64, g_eff_hz: f64, duration_s: f64, sideband: i32) -> Result<Self> {
        if !detuning_hz.is_finite() {
            return Err(Error::config("pulse.detuning_hz", "must be finite"));
        }
        if !(g_eff_hz.is_finite() && g_eff_hz >= 0.0) {
            return Err(Error::config(
                "pulse.g_eff_hz",
                format!("must be finite and >= 0, got {g_eff_hz}"),
            ));
        }
        if !(duration_s.is_finite() && duration_s >= 0.0) {
            return Err(Error::config(
                "pulse.duration_s",
                format!("must be finite and >= 0, got {duration_s}"),
            ));
        }
        Ok(Self {
            detuning_hz,
            g_eff_hz,
            duration_s,
            sideband,
            bare_hz: None,
        })
    }

    /// π pulse: `duration = 0.5 / g_eff`.
    pub fn pi_pulse(detuning_hz: f64, g_eff_hz: f64, sideband: i32) -> Result<Self> {
        if !(g_eff_hz > 0.0) {
            return Err(Error::config(
                "pulse.g_eff_hz",
                format!("a π pulse needs g_eff > 0, got {g_eff_hz}"),
            ));
        }
        Self::new(detuning_hz, g_eff_hz, 0.5 / g_eff_hz, sideband)
    }

    /// Pulse from a bare Rabi frequency, with `g_eff = g₀ |𝓡^sideband|`.
    pub fn from_bare(
        model: &EffectiveModel,
        bare_hz: f64,
        detuning_hz: f64,
        sideband: i32,
        length: PulseLength,
    ) -> Result<Self> {
        if !(bare_hz.is_finite() && bare_hz >= 0.0) {
            return Err(Error::config("pulse.g0_hz", format!("must be >= 0, got {bare_hz}")));
        }
        let g_eff = model.sideband_coupling_hz(bare_hz, sideband)?;
        let mut pulse = match length {
            PulseLength::Fixed(duration) => Self::new(detuning_hz, g_eff, duration, sideband)?,
            PulseLength::Pi => Self::pi_pulse(detuning_hz, g_eff, sideband)?,
        };
        pulse.bare_hz = Some(bare_hz);
        Ok(pulse)
    }

    pub fn with_detuning(&self, detuning_hz: f64) -> Self {
        Self {
            detuning_hz,
            ..self.clone()
        }
    }

    /// Effective coupling of this laser on sideband `m`.
    pub fn coupling_for(&self, model: &EffectiveModel, m: i32) -> Result<f64> {
        if m == self.sideband {
            return Ok(self.g_eff_hz);
        }
        match self.bare_hz {
            Some(g0) => model.sideband_coupling_hz(g0, m),
            None => Err(Error::config(
                "pulse.g0_hz",
                format!(
                    "pulse on sideband {} has no bare coupling, cannot evaluate sideband {m}",
                    self.sideband
                ),
            )),
        }
    }
}
