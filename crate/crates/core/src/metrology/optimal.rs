use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

use super::fisher::{FisherEvaluator, FisherPoint, FisherQuery};
use super::scan::first_argmax;

/// Fisher information sampled over a wait-time window.
#[derive(Clone, Debug, Serialize)]
pub struct OptimalTime {
    /// Time of maximum Fisher information in the window, s.
    pub t_m: f64,
    pub fisher_max: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `(offset, t_m + offset, point)` for each requested offset.
    pub offsets: Vec<(f64, f64, FisherPoint)>,
}

/// Default search window `[0.5/Δν_s, 1/Δν_s]`.
pub fn default_window(theta_hz: f64) -> (f64, f64) {
    (0.5 / theta_hz, 1.0 / theta_hz)
}

/// Samples `start, start + step, ...` up to `end`.
pub fn window_samples(window: (f64, f64), step: f64) -> Result<Vec<f64>> {
    let (start, end) = window;
    if !(start.is_finite() && end.is_finite() && start >= 0.0 && end > start) {
        return Err(Error::config(
            "optimize.window_s",
            format!("needs 0 <= start < end, got [{start}, {end}]"),
        ));
    }
    if !(step > 0.0 && step < end - start) {
        return Err(Error::config(
            "optimize.step_s",
            format!("must be in (0, {}), got {step}", end - start),
        ));
    }
    let count = ((end - start) / step * (1.0 + 1e-12)).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// Wait time of maximum Fisher information in `window` (default
/// `[0.5/Δν_s, 1/Δν_s]`), plus the values at `t_m + offset`.
pub fn find_optimal_time(
    query: &FisherQuery,
    window: Option<(f64, f64)>,
    step: f64,
    offsets: &[f64],
) -> Result<OptimalTime> {
    let evaluator = FisherEvaluator::new(query)?;
    find_optimal_time_with(&evaluator, window, step, offsets)
}

pub fn find_optimal_time_with(
    evaluator: &FisherEvaluator,
    window: Option<(f64, f64)>,
    step: f64,
    offsets: &[f64],
) -> Result<OptimalTime> {
    let window = window.unwrap_or_else(|| default_window(evaluator.theta_hz()));
    let times = window_samples(window, step)?;
    let values: Vec<f64> = times.par_iter().map(|&t| evaluator.at_wait(t).fisher).collect();
    let (index, fisher_max) = first_argmax(&values);
    let t_m = times[index];
    let offsets = offsets
        .iter()
        .map(|&dt| {
            let t = t_m + dt;
            if t < 0.0 {
                return Err(Error::config("optimize.offsets_s", format!("t_m + {dt} is negative")));
            }
            Ok((dt, t, evaluator.at_wait(t)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OptimalTime {
        t_m,
        fisher_max,
        times,
        values,
        offsets,
    })
}
