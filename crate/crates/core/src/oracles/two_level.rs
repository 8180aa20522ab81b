use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest tolerated deviation of `|c_e|² + |c_g|²` from one.
const NORM_DRIFT_LIMIT: f64 = 1e-8;

/// Clock-phase imprint `φ(t)` of the lattice drive.
#[derive(Clone)]
pub enum PhaseModulation {
    None,
    /// `φ(t) = -Φ ν_a sin(2π ν_s t) / (2π ν_s)` for `Δν = ν_a cos(2π ν_s t)`.
    Cosine {
        amplitude_hz: f64,
        nu_s_hz: f64,
        soc_phase: f64,
    },
    Custom {
        period_s: f64,
        phase: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for PhaseModulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::None => f.write_str("None"),
            Self::Cosine {
                amplitude_hz,
                nu_s_hz,
                soc_phase,
            } => f
                .debug_struct("Cosine")
                .field("amplitude_hz", amplitude_hz)
                .field("nu_s_hz", nu_s_hz)
                .field("soc_phase", soc_phase)
                .finish(),
            Self::Custom { period_s, .. } => f.debug_struct("Custom").field("period_s", period_s).finish(),
        }
    }
}

impl PhaseModulation {
    fn period(&self) -> Option<f64> {
        match self {
            Self::None => None,
            Self::Cosine { nu_s_hz, .. } => Some(1.0 / nu_s_hz),
            Self::Custom { period_s, .. } => Some(*period_s),
        }
    }

    fn at(&self, t: f64) -> f64 {
        match self {
            Self::None => 0.0,
            Self::Cosine {
                amplitude_hz,
                nu_s_hz,
                soc_phase,
            } => -soc_phase * amplitude_hz * (TAU * nu_s_hz * t).sin() / (TAU * nu_s_hz),
            Self::Custom { phase, .. } => phase(t),
        }
    }
}

/// Single atom driven on the clock transition in the modulated lattice,
/// `H/h = (δ/2) σ_z + (g/2)(e^{iφ(t)} σ₊ + h.c.)`.
#[derive(Clone, Debug)]
pub struct TwoLevelSim {
    pub coupling_hz: f64,
    pub detuning_hz: f64,
    pub phase_modulation: PhaseModulation,
    pub step_s: f64,
    pub duration_s: f64,
    /// Record every `record_every`-th step (and the final state).
    pub record_every: usize,
}

impl TwoLevelSim {
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling_hz > 0.0 && self.coupling_hz.is_finite()) {
            return Err(Error::config("oracle.g_hz", "must be finite and > 0"));
        }
        if !self.detuning_hz.is_finite() {
            return Err(Error::config("oracle.detuning_hz", "must be finite"));
        }
        if self.duration_s < 2.0 / self.coupling_hz {
            return Err(Error::config(
                "oracle.duration_s",
                format!("must cover at least 2/g = {} s", 2.0 / self.coupling_hz),
            ));
        }
        if !(self.step_s > 0.0) {
            return Err(Error::config("oracle.step_s", "must be > 0"));
        }
        if let Some(period) = self.phase_modulation.period() {
            if self.step_s > period / 1000.0 * (1.0 + 1e-12) {
                return Err(Error::config(
                    "oracle.step_s",
                    format!("must be <= T_s/1000 = {} s, got {}", period / 1000.0, self.step_s),
                ));
            }
        }
        if self.record_every == 0 {
            return Err(Error::config("oracle.record_every", "must be >= 1"));
        }
        Ok(())
    }
}

/// Excited-state population over time.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLevelTrace {
    pub times: Vec<f64>,
    pub excited: Vec<f64>,
    /// Largest `| |c|² - 1 |` seen at the recorded points.
    pub max_norm_drift: f64,
}

type State = [Complex64; 2];

fn derivative(sim: &TwoLevelSim, t: f64, c: &State) -> State {
    // i dc/dt = 2π H c with c = (c_e, c_g)
    let coupling = Complex64::from_polar(sim.coupling_hz, sim.phase_modulation.at(t));
    let minus_i_pi = Complex64::new(0.0, -PI);
    [
        minus_i_pi * (sim.detuning_hz * c[0] + coupling * c[1]),
        minus_i_pi * (coupling.conj() * c[0] - sim.detuning_hz * c[1]),
    ]
}

fn axpy(c: &State, k: &State, h: f64) -> State {
    [c[0] + k[0] * h, c[1] + k[1] * h]
}

/// Fixed-step RK4 evolution from the ground state.
pub fn evolve_two_level(sim: &TwoLevelSim) -> Result<TwoLevelTrace> {
    sim.validate()?;
    let steps = (sim.duration_s / sim.step_s).ceil() as usize;
    let h = sim.duration_s / steps as f64;
    let mut c: State = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let capacity = steps / sim.record_every + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut excited = Vec::with_capacity(capacity);
    times.push(0.0);
    excited.push(0.0);
    let mut max_drift: f64 = 0.0;
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = derivative(sim, t, &c);
        let k2 = derivative(sim, t + 0.5 * h, &axpy(&c, &k1, 0.5 * h));
        let k3 = derivative(sim, t + 0.5 * h, &axpy(&c, &k2, 0.5 * h));
        let k4 = derivative(sim, t + h, &axpy(&c, &k3, h));
        for i in 0..2 {
            c[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        if (k + 1) % sim.record_every == 0 || k + 1 == steps {
            let norm = c[0].norm_sqr() + c[1].norm_sqr();
            let drift = (norm - 1.0).abs();
            max_drift = max_drift.max(drift);
            if drift > NORM_DRIFT_LIMIT {
                return Err(Error::StepSize { drift });
            }
            times.push((k + 1) as f64 * h);
            excited.push(c[0].norm_sqr());
        }
    }
    Ok(TwoLevelTrace {
        times,
        excited,
        max_norm_drift: max_drift,
    })
}

/// Least-squares residual of `a sin²(π f t)` with the optimal amplitude.
fn residual(times: &[f64], values: &[f64], f: f64) -> f64 {
    let (mut ss, mut sp, mut pp) = (0.0, 0.0, 0.0);
    for (&t, &p) in times.iter().zip(values) {
        let s = (PI * f * t).sin().powi(2);
        ss += s * s;
        sp += s * p;
        pp += p * p;
    }
    if ss == 0.0 {
        pp
    } else {
        pp - sp * sp / ss
    }
}

/// Frequency `f` of the best fit `a sin²(π f t)` within `[lo, hi]`.
///
/// A coarse scan brackets the global minimum of the residual, then
/// golden-section search refines it. The residual is flat to second order at
/// its minimum, so the result is good to about `√ε` relative.
pub fn fit_rabi_frequency(times: &[f64], values: &[f64], lo: f64, hi: f64) -> Result<f64> {
    if times.len() != values.len() || times.len() < 8 {
        return Err(Error::Numeric("need at least 8 matching samples to fit".into()));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Numeric(format!("bad frequency bracket [{lo}, {hi}]")));
    }
    const COARSE: usize = 2000;
    let step = (hi - lo) / COARSE as f64;
    let mut best = (0, f64::INFINITY);
    for k in 0..=COARSE {
        let r = residual(times, values, lo + k as f64 * step);
        if r < best.1 {
            best = (k, r);
        }
    }
    let mut a = lo + (best.0.max(1) - 1) as f64 * step;
    let mut b = (lo + (best.0 + 1) as f64 * step).min(hi);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = residual(times, values, x1);
    let mut f2 = residual(times, values, x2);
    while b - a > 1e-10 * b {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = residual(times, values, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = residual(times, values, x2);
        }
    }
    Ok(0.5 * (a + b))
}
