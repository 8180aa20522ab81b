use std::f64::consts::TAU;

use crate::{Error, Result};

use super::species::positive;

pub const MIN_TABULATED_SAMPLES: usize = 64;
/// Hard bound on the off-resonance fraction |Δ|.
pub const MAX_DELTA_FRAC: f64 = 0.1;
/// |Δ| above this value is accepted with a warning.
pub const WARN_DELTA_FRAC: f64 = 0.01;

/// Shape of the lattice frequency modulation `Δν(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Waveform {
    /// `Δν(t) = ν_a cos(2π ν_s t)`.
    Cosine { amplitude_hz: f64 },
    Tabulated(TabulatedWaveform),
}

/// One period of `Δν(t)` sampled at `t_k = k T_s / K`, held constant on
/// each sample interval (the output of an arbitrary function generator).
///
/// The sample mean is removed at construction: a constant offset would make
/// the clock phase imprint grow without bound and leave no period average.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedWaveform {
    samples_hz: Vec<f64>,
    removed_mean_hz: f64,
    // prefix[k] = Σ_{j<k} samples[j]
    prefix: Vec<f64>,
}

impl TabulatedWaveform {
    pub fn new(samples_hz: Vec<f64>) -> Result<Self> {
        if samples_hz.len() < MIN_TABULATED_SAMPLES {
            return Err(Error::config(
                "drive.samples_hz",
                format!(
                    "need at least {MIN_TABULATED_SAMPLES} samples per period, got {}",
                    samples_hz.len()
                ),
            ));
        }
        if let Some(bad) = samples_hz.iter().find(|v| !v.is_finite()) {
            return Err(Error::config("drive.samples_hz", format!("non-finite sample {bad}")));
        }
        let mean = samples_hz.iter().sum::<f64>() / samples_hz.len() as f64;
        let samples: Vec<f64> = samples_hz.iter().map(|v| v - mean).collect();
        let mut prefix = Vec::with_capacity(samples.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for v in &samples {
            acc += v;
            prefix.push(acc);
        }
        Ok(Self {
            samples_hz: samples,
            removed_mean_hz: mean,
            prefix,
        })
    }

    /// Mean-free samples.
    pub fn samples_hz(&self) -> &[f64] {
        &self.samples_hz
    }

    pub fn removed_mean_hz(&self) -> f64 {
        self.removed_mean_hz
    }

    pub fn len(&self) -> usize {
        self.samples_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples_hz.is_empty()
    }

    fn locate(&self, phase: f64) -> (usize, f64) {
        let k = self.samples_hz.len();
        let position = phase * k as f64;
        let index = (position.floor() as usize).min(k - 1);
        (index, position - index as f64)
    }
}

impl Waveform {
    /// `Δν(t)` in Hz for drive frequency `nu_s`.
    pub fn value(&self, nu_s: f64, t: f64) -> f64 {
        match self {
            Waveform::Cosine { amplitude_hz } => amplitude_hz * (TAU * nu_s * t).cos(),
            Waveform::Tabulated(tab) => {
                let (index, _) = tab.locate((nu_s * t).rem_euclid(1.0));
                tab.samples_hz[index]
            }
        }
    }

    /// `∫_0^t Δν(τ) dτ`, in cycles (Hz s).
    pub fn integral(&self, nu_s: f64, t: f64) -> f64 {
        match self {
            Waveform::Cosine { amplitude_hz } => {
                amplitude_hz * (TAU * nu_s * t).sin() / (TAU * nu_s)
            }
            Waveform::Tabulated(tab) => {
                // whole periods integrate to zero after mean removal
                let (index, fraction) = tab.locate((nu_s * t).rem_euclid(1.0));
                let dt = 1.0 / (nu_s * tab.len() as f64);
                (tab.prefix[index] + fraction * tab.samples_hz[index]) * dt
            }
        }
    }

    /// Number of smooth pieces per period; quadrature panels align with them.
    pub fn pieces(&self) -> usize {
        match self {
            Waveform::Cosine { .. } => 4,
            Waveform::Tabulated(tab) => tab.len(),
        }
    }
}

/// Periodic lattice drive together with the static-force resonance data
/// `F_0 d = (n + Δ) h ν_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveConfig {
    /// `None` when only renormalised couplings are supplied directly.
    pub waveform: Option<Waveform>,
    nu_s_hz: f64,
    n_res: i32,
    delta_nu_hz: f64,
}

impl DriveConfig {
    /// Drive with off-resonance given as the fraction `Δ`.
    pub fn new(waveform: Option<Waveform>, nu_s_hz: f64, n_res: i32, delta_frac: f64) -> Result<Self> {
        positive("drive.nu_s_hz", nu_s_hz)?;
        Self::with_detuning_hz(waveform, nu_s_hz, n_res, delta_frac * nu_s_hz)
    }

    /// Drive with off-resonance given directly as `Δν_s` in Hz.
    pub fn with_detuning_hz(
        waveform: Option<Waveform>,
        nu_s_hz: f64,
        n_res: i32,
        delta_nu_hz: f64,
    ) -> Result<Self> {
        positive("drive.nu_s_hz", nu_s_hz)?;
        if !delta_nu_hz.is_finite() || (delta_nu_hz / nu_s_hz).abs() >= MAX_DELTA_FRAC {
            return Err(Error::config(
                "drive.delta_frac",
                format!(
                    "|Δ| must be below {MAX_DELTA_FRAC}, got {}",
                    delta_nu_hz / nu_s_hz
                ),
            ));
        }
        if let Some(Waveform::Cosine { amplitude_hz }) = &waveform {
            if !amplitude_hz.is_finite() {
                return Err(Error::config("drive.amplitude_hz", "must be finite"));
            }
        }
        Ok(Self {
            waveform,
            nu_s_hz,
            n_res,
            delta_nu_hz,
        })
    }

    pub fn cosine(amplitude_hz: f64, nu_s_hz: f64, n_res: i32, delta_frac: f64) -> Result<Self> {
        Self::new(Some(Waveform::Cosine { amplitude_hz }), nu_s_hz, n_res, delta_frac)
    }

    pub fn nu_s_hz(&self) -> f64 {
        self.nu_s_hz
    }

    pub fn period_s(&self) -> f64 {
        1.0 / self.nu_s_hz
    }

    pub fn n_res(&self) -> i32 {
        self.n_res
    }

    /// Off-resonance fraction Δ.
    pub fn delta_frac(&self) -> f64 {
        self.delta_nu_hz / self.nu_s_hz
    }

    /// Residual force frequency `Δν_s`, the SBO frequency.
    pub fn delta_nu_hz(&self) -> f64 {
        self.delta_nu_hz
    }

    /// Same drive with a different `Δν_s`.
    pub fn with_delta_nu(&self, delta_nu_hz: f64) -> Result<Self> {
        Self::with_detuning_hz(self.waveform.clone(), self.nu_s_hz, self.n_res, delta_nu_hz)
    }

    /// Total static-force frequency `(n + Δ) ν_s`.
    pub fn force_frequency_hz(&self) -> f64 {
        self.n_res as f64 * self.nu_s_hz + self.delta_nu_hz
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.delta_frac().abs() > WARN_DELTA_FRAC {
            out.push(format!(
                "off-resonance fraction |Δ| = {} exceeds {WARN_DELTA_FRAC}; the slow-drift treatment of Δν_s degrades",
                self.delta_frac().abs()
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: usize, amplitude: f64) -> TabulatedWaveform {
        let samples = (0..n)
            .map(|k| if k < n / 2 { amplitude } else { -amplitude })
            .collect();
        TabulatedWaveform::new(samples).unwrap()
    }

    #[test]
    fn tabulated_needs_enough_samples() {
        assert!(TabulatedWaveform::new(vec![1.0; 63]).is_err());
        assert!(TabulatedWaveform::new(vec![1.0; 64]).is_ok());
    }

    #[test]
    fn mean_is_removed() {
        let tab = TabulatedWaveform::new((0..64).map(|k| 10.0 + k as f64).collect()).unwrap();
        assert!((tab.removed_mean_hz() - 41.5).abs() < 1e-12);
        assert!(tab.samples_hz().iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn square_wave_integral_is_triangle() {
        let w = Waveform::Tabulated(square(64, 100.0));
        let nu_s = 50.0;
        let period = 1.0 / nu_s;
        assert!((w.integral(nu_s, 0.25 * period) - 100.0 * 0.25 * period).abs() < 1e-12);
        assert!((w.integral(nu_s, 0.5 * period) - 100.0 * 0.5 * period).abs() < 1e-12);
        assert!((w.integral(nu_s, 0.75 * period) - 100.0 * 0.25 * period).abs() < 1e-12);
        assert!(w.integral(nu_s, 3.0 * period).abs() < 1e-12);
        assert_eq!(w.value(nu_s, 0.6 * period), -100.0);
    }

    #[test]
    fn cosine_integral_matches_closed_form() {
        let w = Waveform::Cosine { amplitude_hz: 5000.0 };
        let t = 1.234e-4;
        let expected = 5000.0 * (TAU * 2000.0 * t).sin() / (TAU * 2000.0);
        assert!((w.integral(2000.0, t) - expected).abs() < 1e-15);
    }

    #[test]
    fn delta_fraction_bounds() {
        assert!(DriveConfig::cosine(1.0, 1000.0, 1, 0.1).is_err());
        assert!(DriveConfig::cosine(1.0, 1000.0, 1, -0.0999).is_ok());
        assert!(DriveConfig::cosine(1.0, 0.0, 1, 0.0).is_err());
        let d = DriveConfig::cosine(1.0, 1000.0, 1, 0.02).unwrap();
        assert_eq!(d.warnings().len(), 1);
        let d = DriveConfig::cosine(1.0, 2000.0, 1, 5.0 / 2000.0).unwrap();
        assert!(d.warnings().is_empty());
        assert!((d.delta_nu_hz() - 5.0).abs() < 1e-12);
    }
}
