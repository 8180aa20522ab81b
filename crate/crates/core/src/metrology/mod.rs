//! Gravimetry from super-Bloch oscillations: Fisher information of the
//! two-pulse protocol with respect to `θ = Δν_s`, dense parameter scans and
//! the conversion to gravity.

mod fisher;
mod gravity;
mod optimal;
mod scan;

pub use fisher::{
    dpg_dtheta, fisher_information, FisherEvaluator, FisherPoint, FisherQuery, PG_VARIANCE_FLOOR,
    SLOPE_FLOOR,
};
pub use gravity::{force_frequency_for_gravity, gravity_convert, GravityResult};
pub use optimal::{default_window, find_optimal_time, find_optimal_time_with, window_samples, OptimalTime};
pub use scan::{
    scan, scan_with_evaluator, FisherScanResult, ScanAxis, ScanParameter, ScanSpec, DEFAULT_GRID_CAP,
};

use serde::Serialize;

use crate::model::DriveConfig;
use crate::Result;

/// Wait time given as whole drive periods plus an offset, so times
/// like `845 T_s + 19 s` are reproduced without rounding the period count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SboTime {
    pub periods: u64,
    pub offset_s: f64,
}

impl SboTime {
    pub fn new(periods: u64, offset_s: f64) -> Self {
        Self { periods, offset_s }
    }

    pub fn seconds(&self, drive: &DriveConfig) -> f64 {
        self.periods as f64 / drive.nu_s_hz() + self.offset_s
    }
}

/// Gravity uncertainty at a chosen protocol point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AccuracyEstimate {
    pub fisher: FisherPoint,
    /// `δ(Δν_s) = 1/√F`, Hz.
    pub crb_hz: f64,
    pub force_freq_hz: f64,
    /// `δg/g`; infinite when `F = 0`.
    pub rel_uncertainty: f64,
    /// False when `F = 0` leaves the estimate unbounded.
    pub bounded: bool,
}

/// `δg/g = (1/√F) / ((n+Δ) ν_s)` at the query's configured point.
pub fn endpoint_accuracy(query: &FisherQuery) -> Result<AccuracyEstimate> {
    let evaluator = FisherEvaluator::new(query)?;
    Ok(accuracy_at(&evaluator, query.protocol.wait_s))
}

/// Accuracy estimate at wait `wait_s` reusing an evaluator.
pub fn accuracy_at(evaluator: &FisherEvaluator, wait_s: f64) -> AccuracyEstimate {
    accuracy_from_point(evaluator.at_wait(wait_s), evaluator.protocol().config().model.drive())
}

pub fn accuracy_from_point(fisher: FisherPoint, drive: &DriveConfig) -> AccuracyEstimate {
    let force_freq_hz = drive.force_frequency_hz();
    let bounded = fisher.fisher > 0.0;
    let crb_hz = if bounded { 1.0 / fisher.fisher.sqrt() } else { f64::INFINITY };
    AccuracyEstimate {
        fisher,
        crb_hz,
        force_freq_hz,
        rel_uncertainty: crb_hz / force_freq_hz,
        bounded,
    }
}
