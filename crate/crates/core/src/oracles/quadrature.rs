use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::model::{AtomSpecies, DriveConfig, Waveform};
use crate::{Error, Result};

type PhaseFn = Box<dyn Fn(usize, f64) -> f64 + Send + Sync>;

const TOLERANCE: f64 = 1e-13;
const MAX_LEVEL: usize = 24;

/// Complex integral with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate {
    pub value: Complex64,
    pub error: f64,
}

/// Romberg integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn romberg(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<QuadEstimate> {
    let h0 = b - a;
    let mut prev: Vec<Complex64> = vec![(f(a) + f(b)) * (0.5 * h0)];
    let mut last_change = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        let intervals = 1usize << level;
        let h = h0 / intervals as f64;
        let mut mid = Complex64::new(0.0, 0.0);
        for k in (1..intervals).step_by(2) {
            mid += f(a + k as f64 * h);
        }
        let mut row = Vec::with_capacity(level + 1);
        row.push(prev[0] * 0.5 + mid * h);
        let mut factor = 1.0;
        for j in 1..=level {
            factor *= 4.0;
            let r = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            row.push(r);
        }
        let change = (row[level] - prev[level - 1]).norm();
        // Two consecutive small changes guard against accidental agreement on
        // coarse periodic samples.
        if level >= 4 && change <= tol && last_change <= 10.0 * tol {
            return Ok(QuadEstimate {
                value: row[level],
                error: change.max(last_change),
            });
        }
        last_change = change;
        prev = row;
    }
    Err(Error::Quadrature {
        estimate: last_change,
        tolerance: tol,
    })
}

/// Which period-averaged coefficient to compute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseKind {
    /// Hop of `distance` sites at static-force resonance `n_res`.
    Hopping {
        distance: i32,
        n_res: i32,
        recoil_hz: f64,
    },
    /// Clock sideband `m` with spin-orbit phase `soc_phase`.
    Rabi { m: i32, soc_phase: f64 },
}

impl PhaseKind {
    pub fn hopping(drive: &DriveConfig, species: &AtomSpecies, distance: i32) -> Self {
        Self::Hopping {
            distance,
            n_res: drive.n_res(),
            recoil_hz: species.recoil_hz(),
        }
    }

    pub fn rabi(species: &AtomSpecies, m: i32) -> Self {
        Self::Rabi {
            m,
            soc_phase: species.soc_phase(),
        }
    }
}

/// Phase `θ(segment, t)` whose period average defines the coefficient,
/// together with the points in one period where the waveform has kinks or
/// jumps. `segment` indexes the interval between consecutive breakpoints, so
/// a jump never depends on how `t` rounds.
///
/// The clock-phase imprint `∫Δν` is rebuilt here from the samples rather than
/// taken from the waveform's own running sums.
pub fn coefficient_phase(
    waveform: &Waveform,
    nu_s: f64,
    kind: PhaseKind,
) -> (PhaseFn, Vec<f64>) {
    let period = 1.0 / nu_s;
    match waveform {
        Waveform::Cosine { amplitude_hz } => {
            let a = *amplitude_hz;
            let phase: PhaseFn = match kind {
                PhaseKind::Hopping {
                    distance,
                    n_res,
                    recoil_hz,
                } => Box::new(move |_, t| {
                    distance as f64
                        * (PI * a * (TAU * nu_s * t).cos() / (4.0 * recoil_hz)
                            + TAU * n_res as f64 * nu_s * t)
                }),
                PhaseKind::Rabi { m, soc_phase } => Box::new(move |_, t| {
                    let imprint = a * (TAU * nu_s * t).sin() / (TAU * nu_s);
                    -(soc_phase * imprint + TAU * m as f64 * nu_s * t)
                }),
            };
            (phase, vec![0.0, period])
        }
        Waveform::Tabulated(tab) => {
            let samples = tab.samples_hz().to_vec();
            let k = samples.len();
            let dt = period / k as f64;
            let breaks: Vec<f64> = (0..=k).map(|j| j as f64 * dt).collect();
            let mut cumulative = vec![0.0; k + 1];
            for j in 0..k {
                cumulative[j + 1] = cumulative[j] + samples[j] * dt;
            }
            let phase: PhaseFn = match kind {
                PhaseKind::Hopping {
                    distance,
                    n_res,
                    recoil_hz,
                } => Box::new(move |j, t| {
                    let v = samples[j];
                    distance as f64 * (PI * v / (4.0 * recoil_hz) + TAU * n_res as f64 * nu_s * t)
                }),
                PhaseKind::Rabi { m, soc_phase } => Box::new(move |j, t| {
                    let imprint = cumulative[j] + samples[j] * (t - j as f64 * dt);
                    -(soc_phase * imprint + TAU * m as f64 * nu_s * t)
                }),
            };
            (phase, breaks)
        }
    }
}

/// `(1/T_s) ∫_0^{T_s} e^{iθ(t)} dt` by Romberg integration on each smooth
/// segment.
pub fn quad_coefficient(waveform: &Waveform, nu_s: f64, kind: PhaseKind) -> Result<QuadEstimate> {
    let (phase, breaks) = coefficient_phase(waveform, nu_s, kind);
    let period = 1.0 / nu_s;
    let segments = breaks.len() - 1;
    let tol = TOLERANCE * period / segments as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for (j, w) in breaks.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let f = |t: f64| Complex64::from_polar(1.0, phase(j, t));
        let est = romberg(&f, a, b, tol)?;
        value += est.value;
        error += est.error;
    }
    Ok(QuadEstimate {
        value: value / period,
        error: error / period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn romberg_integrates_polynomials_and_exponentials() {
        let est = romberg(&|t| Complex64::new(t * t * t, 0.0), 0.0, 2.0, 1e-13).unwrap();
        assert!((est.value.re - 4.0).abs() < 1e-12);
        let est = romberg(&|t| Complex64::from_polar(1.0, 3.0 * t), 0.0, 1.0, 1e-13).unwrap();
        let exact = (Complex64::from_polar(1.0, 3.0) - 1.0) / Complex64::new(0.0, 3.0);
        assert!((est.value - exact).norm() < 1e-12);
    }

    #[test]
    fn zero_waveform_rabi_is_one() {
        let w = Waveform::Cosine { amplitude_hz: 0.0 };
        let est = quad_coefficient(&w, 1500.0, PhaseKind::Rabi { m: 0, soc_phase: 3.66 }).unwrap();
        assert!((est.value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
