use std::f64::consts::TAU;
use std::sync::Arc;

use rayon::prelude::*;

use crate::ensemble::{build_ensemble, ThermalEnsemble};
use crate::model::{EffectiveModel, PulseConfig};
use crate::{Error, Result};

use super::lineshape::{lineshape, lineshape_with_slope};
use super::preparation::{prepare_with, PreparedState};
use super::{sbo_shift, ModeTable, Spectrum};

/// Full two-pulse SBO sequence: prepare on `pulse1`, drift for `wait_s`,
/// probe with `pulse2`.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub model: EffectiveModel,
    pub pulse1: PulseConfig,
    pub wait_s: f64,
    pub pulse2: PulseConfig,
    /// Sidebands whose probe probabilities are added (resolved sidebands).
    pub sideband_set: Vec<i32>,
}

impl ProtocolConfig {
    /// Protocol probing `{-1, 0, 1}` when the probe's bare coupling is known,
    /// otherwise only the probe's own sideband.
    pub fn new(model: EffectiveModel, pulse1: PulseConfig, wait_s: f64, pulse2: PulseConfig) -> Result<Self> {
        let sideband_set = if pulse2.bare_hz.is_some() {
            vec![-1, 0, 1]
        } else {
            vec![pulse2.sideband]
        };
        let cfg = Self {
            model,
            pulse1,
            wait_s,
            pulse2,
            sideband_set,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_sidebands(mut self, sideband_set: Vec<i32>) -> Result<Self> {
        self.sideband_set = sideband_set;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wait_s.is_finite() && self.wait_s >= 0.0) {
            return Err(Error::config(
                "protocol.wait_s",
                format!("must be finite and >= 0, got {}", self.wait_s),
            ));
        }
        if self.sideband_set.is_empty() {
            return Err(Error::config("protocol.sideband_set", "must list at least one sideband"));
        }
        Ok(())
    }

    /// Validity notes: the preparation ignores the residual force, which
    /// needs `Δν_s ≪ g_eff`.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = self.model.drive().warnings();
        let theta = self.model.drive().delta_nu_hz().abs();
        let g_min = self.pulse1.g_eff_hz.min(self.pulse2.g_eff_hz);
        if theta >= 0.1 * g_min {
            out.push(format!(
                "Δν_s = {theta} Hz is not small against the effective Rabi frequency {g_min} Hz; the static-lattice preparation is unreliable"
            ));
        }
        out
    }
}

/// Second pulse with its per-sideband couplings resolved.
#[derive(Clone, Debug)]
pub struct Probe {
    pub detuning_hz: f64,
    pub duration_s: f64,
    /// `(m, g_eff on sideband m)`.
    pub couplings: Vec<(i32, f64)>,
}

impl Probe {
    pub fn new(model: &EffectiveModel, pulse: &PulseConfig, sideband_set: &[i32]) -> Result<Self> {
        let couplings = sideband_set
            .iter()
            .map(|&m| Ok((m, pulse.coupling_for(model, m)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            detuning_hz: pulse.detuning_hz,
            duration_s: pulse.duration_s,
            couplings,
        })
    }

    pub fn with_detuning(&self, detuning_hz: f64) -> Self {
        Self {
            detuning_hz,
            ..self.clone()
        }
    }
}

/// Protocol ground-state probability and its sensitivity to `θ = Δν_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolPoint {
    /// `P_g(δ₁, t_p1; δ₂, t_p2)`.
    pub pg: f64,
    /// `∂P_g/∂θ`, 1/Hz.
    pub dpg_dtheta: f64,
    /// Preparation probability `P_e(δ₁, t_p1)`.
    pub pe: f64,
}

/// Abscissa of a protocol sweep.
#[derive(Clone, Debug)]
pub enum ProtocolAxis {
    /// Second-pulse detuning δ₂ at the configured wait.
    Detuning(Vec<f64>),
    /// Wait time at the configured second-pulse detuning.
    Time(Vec<f64>),
}

/// Evaluator holding the ensemble and prepared state of one protocol.
#[derive(Clone, Debug)]
pub struct Protocol {
    config: ProtocolConfig,
    ensemble: Arc<ThermalEnsemble>,
    table: ModeTable,
    prepared: PreparedState,
    probe: Probe,
}

impl Protocol {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        let ensemble = Arc::new(build_ensemble(&config.model)?);
        Self::with_ensemble(config, ensemble)
    }

    /// Reuse an ensemble built for the same model.
    pub fn with_ensemble(config: ProtocolConfig, ensemble: Arc<ThermalEnsemble>) -> Result<Self> {
        config.validate()?;
        let table = ModeTable::new(&config.model, &ensemble);
        let prepared = prepare_with(&config.model, &ensemble, &table, &config.pulse1)?;
        let probe = Probe::new(&config.model, &config.pulse2, &config.sideband_set)?;
        Ok(Self {
            config,
            ensemble,
            table,
            prepared,
            probe,
        })
    }

    /// Same ensemble, different first pulse.
    pub fn with_pulse1(&self, pulse1: PulseConfig) -> Result<Self> {
        let prepared = prepare_with(&self.config.model, &self.ensemble, &self.table, &pulse1)?;
        let mut config = self.config.clone();
        config.pulse1 = pulse1;
        Ok(Self {
            config,
            prepared,
            ..self.clone()
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn ensemble(&self) -> &Arc<ThermalEnsemble> {
        &self.ensemble
    }

    pub fn prepared(&self) -> &PreparedState {
        &self.prepared
    }

    pub fn probe(&self) -> &Probe {
        &self.probe
    }

    /// Probe built from another second pulse on the configured sideband set.
    pub fn probe_for(&self, pulse2: &PulseConfig) -> Result<Probe> {
        Probe::new(&self.config.model, pulse2, &self.config.sideband_set)
    }

    /// `P_g` at the configured θ.
    pub fn ground_probability(&self, delta2_hz: f64, wait_s: f64) -> f64 {
        let probe = self.probe.with_detuning(delta2_hz);
        self.pg_only(&probe, wait_s, self.config.model.drive().delta_nu_hz())
    }

    /// `P_g` and `∂P_g/∂θ` for `probe`, wait `wait_s` and residual force `theta_hz`.
    pub fn evaluate(&self, probe: &Probe, wait_s: f64, theta_hz: f64) -> ProtocolPoint {
        let (sin_q, cos_q) = self.table.shifted(sbo_shift(theta_hz, wait_s));
        let n = self.ensemble.n_sites();
        let mut pg = 0.0;
        let mut slope = 0.0;
        for (s, row) in self.prepared.weights.chunks(n).enumerate() {
            let amplitude = self.table.amplitude[s];
            for ((&w, &sq), &cq) in row.iter().zip(&sin_q).zip(&cos_q) {
                if w == 0.0 {
                    continue;
                }
                let shift = amplitude * sq;
                let dshift = amplitude * cq;
                for &(m, g) in &probe.couplings {
                    let detuning = probe.detuning_hz + m as f64 * self.table.nu_s + shift;
                    let (value, d_value) = lineshape_with_slope(g, detuning, probe.duration_s);
                    pg += w * value;
                    slope += w * d_value * dshift;
                }
            }
        }
        let pe = self.prepared.prep_probability;
        ProtocolPoint {
            pg: pg / pe,
            dpg_dtheta: slope * TAU * wait_s / pe,
            pe,
        }
    }

    /// `P_g` without the derivative.
    pub fn pg_only(&self, probe: &Probe, wait_s: f64, theta_hz: f64) -> f64 {
        let (sin_q, _) = self.table.shifted(sbo_shift(theta_hz, wait_s));
        let n = self.ensemble.n_sites();
        let mut pg = 0.0;
        for (s, row) in self.prepared.weights.chunks(n).enumerate() {
            let amplitude = self.table.amplitude[s];
            for (&w, &sq) in row.iter().zip(&sin_q) {
                if w == 0.0 {
                    continue;
                }
                for &(m, g) in &probe.couplings {
                    let detuning = probe.detuning_hz + m as f64 * self.table.nu_s + amplitude * sq;
                    pg += w * lineshape(g, detuning, probe.duration_s);
                }
            }
        }
        pg / self.prepared.prep_probability
    }

    /// `P_g` over second-pulse detunings at the configured wait.
    pub fn spectrum(&self, delta2_grid: &[f64]) -> Spectrum {
        let theta = self.config.model.drive().delta_nu_hz();
        let values = delta2_grid
            .par_iter()
            .map(|&d| self.pg_only(&self.probe.with_detuning(d), self.config.wait_s, theta))
            .collect();
        Spectrum::new("detuning_hz", delta2_grid.to_vec(), values)
    }

    /// `P_g` over wait times at the configured second-pulse detuning.
    pub fn time_trace(&self, times: &[f64]) -> Spectrum {
        let theta = self.config.model.drive().delta_nu_hz();
        let values = times
            .par_iter()
            .map(|&t| self.pg_only(&self.probe, t, theta))
            .collect();
        Spectrum::new("time_s", times.to_vec(), values)
    }
}

/// Ground-state probability of the full protocol over δ₂ or over wait time.
pub fn protocol_pg(config: &ProtocolConfig, axis: &ProtocolAxis) -> Result<Spectrum> {
    let protocol = Protocol::new(config.clone())?;
    Ok(match axis {
        ProtocolAxis::Detuning(grid) => protocol.spectrum(grid),
        ProtocolAxis::Time(times) => protocol.time_trace(times),
    })
}
