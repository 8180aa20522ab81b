//! Lineshapes, thermal Rabi spectra, momentum-selective preparation and the
//! two-pulse SBO protocol.

mod lineshape;
mod preparation;
mod protocol;

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::ThermalEnsemble;
use crate::model::{wrap_quasimomentum, EffectiveModel, PulseConfig};
use crate::{Error, Result};

pub use lineshape::{lineshape, lineshape_with_slope, rabi_excitation};
pub use preparation::{prepare, PreparedState};
pub use protocol::{protocol_pg, Probe, Protocol, ProtocolAxis, ProtocolConfig, ProtocolPoint};

/// Probability curve over detuning or time.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    /// Column name of the abscissa, e.g. `detuning_hz` or `time_s`.
    pub abscissa_label: String,
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    /// Free-form description of the inputs; filled by callers that emit files.
    pub metadata: serde_json::Value,
}

impl Spectrum {
    pub fn new(abscissa_label: impl Into<String>, abscissa: Vec<f64>, values: Vec<f64>) -> Self {
        Self {
            abscissa_label: abscissa_label.into(),
            abscissa,
            values,
            metadata: serde_json::Value::Null,
        }
    }
}

/// Inclusive arithmetic grid `start, start + step, ..., <= stop`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(Error::config(
            "grid",
            format!("need finite start <= stop and step > 0, got ({start}, {stop}, {step})"),
        ));
    }
    let count = ((stop - start) / step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// SBO quasi-momentum drift `2π Δν_s t`, wrapped to (-π, π].
pub fn sbo_shift(delta_nu_hz: f64, t: f64) -> f64 {
    // reduce in cycles first so long waits keep full precision
    wrap_quasimomentum(TAU * (delta_nu_hz * t).rem_euclid(1.0))
}

/// Quasi-momentum drift after wait `t` for off-resonance fraction `Δ`.
pub fn quasimomentum_shift(delta_frac: f64, nu_s_hz: f64, t: f64) -> f64 {
    sbo_shift(delta_frac * nu_s_hz, t)
}

/// Per-mode pieces of the generalised detuning,
/// `δ̃ = δ + m ν_s + amplitude[s] · sin(q - arg 𝓕₁ + Φ/2)`.
#[derive(Clone, Debug)]
pub(crate) struct ModeTable {
    pub amplitude: Vec<f64>,
    pub sin_q: Vec<f64>,
    pub cos_q: Vec<f64>,
    pub nu_s: f64,
}

impl ModeTable {
    pub fn new(model: &EffectiveModel, ensemble: &ThermalEnsemble) -> Self {
        let offset = 0.5 * model.soc_phase() - model.gauge_phase();
        let (sin_q, cos_q) = ensemble.q_grid().iter().map(|q| (q + offset).sin_cos()).unzip();
        Self {
            amplitude: (0..=ensemble.s_max()).map(|s| model.detuning_amplitude_hz(s)).collect(),
            sin_q,
            cos_q,
            nu_s: model.drive().nu_s_hz(),
        }
    }

    /// Phase factors after a quasi-momentum drift of `shift`.
    pub fn shifted(&self, shift: f64) -> (Vec<f64>, Vec<f64>) {
        if shift == 0.0 {
            return (self.sin_q.clone(), self.cos_q.clone());
        }
        let (s, c) = shift.sin_cos();
        self.sin_q
            .iter()
            .zip(&self.cos_q)
            .map(|(&a, &b)| (a * c + b * s, b * c - a * s))
            .unzip()
    }
}

/// Thermal Rabi spectrum summed over the sidebands in `sideband_set`.
///
/// `template` fixes the duration and coupling; its detuning is replaced by
/// each grid value. Sidebands other than `template.sideband` need the bare
/// coupling of the template.
pub fn thermal_spectrum(
    model: &EffectiveModel,
    ensemble: &ThermalEnsemble,
    template: &PulseConfig,
    detuning_grid: &[f64],
    sideband_set: &[i32],
) -> Result<Spectrum> {
    if sideband_set.is_empty() {
        return Err(Error::config("sideband_set", "must list at least one sideband"));
    }
    let couplings = sideband_set
        .iter()
        .map(|&m| Ok((m, template.coupling_for(model, m)?)))
        .collect::<Result<Vec<_>>>()?;
    let table = ModeTable::new(model, ensemble);
    let n = ensemble.n_sites();
    let weights = ensemble.weights();
    let duration = template.duration_s;
    let values = detuning_grid
        .par_iter()
        .map(|&delta| {
            let mut total = 0.0;
            for &(m, g) in &couplings {
                let base = delta + m as f64 * table.nu_s;
                for (s, row) in weights.chunks(n).enumerate() {
                    let amplitude = table.amplitude[s];
                    for (w, sq) in row.iter().zip(&table.sin_q) {
                        total += w * lineshape(g, base + amplitude * sq, duration);
                    }
                }
            }
            total
        })
        .collect();
    Ok(Spectrum::new("detuning_hz", detuning_grid.to_vec(), values))
}
