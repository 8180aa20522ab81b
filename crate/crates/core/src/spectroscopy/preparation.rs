use num_complex::Complex64;

use crate::ensemble::ThermalEnsemble;
use crate::model::{EffectiveModel, PulseConfig};
use crate::numeric::compensated_sum;
use crate::{Error, Result};

use super::lineshape::lineshape;
use super::ModeTable;

/// Excited population left after the preparation pulse and the cleaning
/// step that removes every atom still in the ground state.
#[derive(Clone, Debug)]
pub struct PreparedState {
    /// `w(s, q) = B/Z · P_e(δ₁, t_p1)`, same layout as the ensemble.
    pub weights: Vec<f64>,
    /// `P_e(δ₁, t_p1) = Σ w`.
    pub prep_probability: f64,
    pub prep_pulse: PulseConfig,
    n_sites: usize,
}

impl PreparedState {
    /// Prepared (unnormalised) population at each grid quasi-momentum.
    pub fn q_distribution(&self) -> Vec<f64> {
        let n = self.n_sites;
        (0..n)
            .map(|j| compensated_sum(self.weights.iter().skip(j).step_by(n).copied()))
            .collect()
    }

    /// Circular variance `1 - |⟨e^{iq}⟩|` of the prepared quasi-momenta.
    pub fn circular_variance(&self, q_grid: &[f64]) -> f64 {
        let mean: Complex64 = self
            .q_distribution()
            .iter()
            .zip(q_grid)
            .map(|(w, &q)| Complex64::from_polar(*w, q))
            .sum();
        1.0 - mean.norm() / self.prep_probability
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }
}

/// Apply the preparation pulse on `pulse1.sideband` to the thermal ensemble.
pub fn prepare(model: &EffectiveModel, ensemble: &ThermalEnsemble, pulse1: &PulseConfig) -> Result<PreparedState> {
    let table = ModeTable::new(model, ensemble);
    prepare_with(model, ensemble, &table, pulse1)
}

pub(crate) fn prepare_with(
    model: &EffectiveModel,
    ensemble: &ThermalEnsemble,
    table: &ModeTable,
    pulse1: &PulseConfig,
) -> Result<PreparedState> {
    let n = ensemble.n_sites();
    let base = pulse1.detuning_hz + pulse1.sideband as f64 * model.drive().nu_s_hz();
    let mut weights = Vec::with_capacity(ensemble.len());
    for (s, row) in ensemble.weights().chunks(n).enumerate() {
        let amplitude = table.amplitude[s];
        weights.extend(row.iter().zip(&table.sin_q).map(|(w, sq)| {
            w * lineshape(pulse1.g_eff_hz, base + amplitude * sq, pulse1.duration_s)
        }));
    }
    let prep_probability = compensated_sum(weights.iter().copied());
    if !(prep_probability >= 1e-12) {
        return Err(Error::DegeneratePreparation {
            probability: prep_probability,
        });
    }
    Ok(PreparedState {
        weights,
        prep_probability,
        prep_pulse: pulse1.clone(),
        n_sites: n,
    })
}
