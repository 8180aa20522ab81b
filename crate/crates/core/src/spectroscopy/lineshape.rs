use std::f64::consts::PI;

use crate::model::{EffectiveModel, PulseConfig};

/// Rabi lineshape `g²/(g²+δ̃²) sin²(π √(g²+δ̃²) t)`.
#[inline]
pub fn lineshape(g_hz: f64, detuning_hz: f64, duration_s: f64) -> f64 {
    let omega2 = g_hz * g_hz + detuning_hz * detuning_hz;
    if omega2 == 0.0 {
        return 0.0;
    }
    let s = (PI * omega2.sqrt() * duration_s).sin();
    g_hz * g_hz / omega2 * s * s
}

/// Lineshape together with its derivative with respect to the detuning.
#[inline]
pub fn lineshape_with_slope(g_hz: f64, detuning_hz: f64, duration_s: f64) -> (f64, f64) {
    let g2 = g_hz * g_hz;
    let omega2 = g2 + detuning_hz * detuning_hz;
    if omega2 == 0.0 {
        return (0.0, 0.0);
    }
    let omega = omega2.sqrt();
    let (s, c) = (PI * omega * duration_s).sin_cos();
    let value = g2 / omega2 * s * s;
    let slope = 2.0 * g2 * detuning_hz * (PI * duration_s * s * c / (omega2 * omega) - s * s / (omega2 * omega2));
    (value, slope)
}

/// Excited-state probability of a ground-state atom in mode `(s, q)` after
/// `pulse`, driven on `pulse.sideband`.
pub fn rabi_excitation(model: &EffectiveModel, q: f64, s: u32, pulse: &PulseConfig) -> f64 {
    let detuning = model.generalized_detuning_hz(q, s, pulse.sideband, pulse.detuning_hz);
    lineshape(pulse.g_eff_hz, detuning, pulse.duration_s)
}
