use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::PulseConfig;
use crate::spectroscopy::Protocol;
use crate::{Error, Result};

use super::fisher::{FisherEvaluator, FisherPoint, FisherQuery};

/// Default refusal threshold for dense scans.
pub const DEFAULT_GRID_CAP: u64 = 10_000_000;

/// Protocol parameter swept by a scan axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    Delta1Hz,
    Delta2Hz,
    /// First-pulse effective Rabi frequency; the pulse becomes a π pulse.
    G1Hz,
    /// Second-pulse effective Rabi frequency; the pulse becomes a π pulse.
    G2Hz,
    WaitS,
}

impl ScanParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Delta1Hz => "delta1_hz",
            Self::Delta2Hz => "delta2_hz",
            Self::G1Hz => "g1_hz",
            Self::G2Hz => "g2_hz",
            Self::WaitS => "wait_s",
        }
    }
}

impl fmt::Display for ScanParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanAxis {
    pub parameter: ScanParameter,
    pub values: Vec<f64>,
}

impl ScanAxis {
    pub fn new(parameter: ScanParameter, values: Vec<f64>) -> Self {
        Self { parameter, values }
    }

    /// `points` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(parameter: ScanParameter, start: f64, stop: f64, points: usize) -> Self {
        let values = match points {
            0 => Vec::new(),
            1 => vec![start],
            _ => {
                let step = (stop - start) / (points - 1) as f64;
                (0..points).map(|k| start + k as f64 * step).collect()
            }
        };
        Self { parameter, values }
    }
}

/// Axes of a dense Fisher scan, the first axis varying slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanSpec {
    pub axes: Vec<ScanAxis>,
    pub cap: u64,
}

impl ScanSpec {
    pub fn new(axes: Vec<ScanAxis>) -> Self {
        Self {
            axes,
            cap: DEFAULT_GRID_CAP,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// Number of grid points, refusing grids above the cap.
    pub fn evaluations(&self) -> Result<u64> {
        let mut total: u64 = 1;
        let mut seen = Vec::new();
        for axis in &self.axes {
            if seen.contains(&axis.parameter) {
                return Err(Error::config(
                    "scan.axes",
                    format!("parameter {} appears on more than one axis", axis.parameter),
                ));
            }
            seen.push(axis.parameter);
            if axis.values.is_empty() {
                return Err(Error::config(
                    "scan.axes",
                    format!("axis {} has no points", axis.parameter),
                ));
            }
            if let Some(v) = axis.values.iter().find(|v| !v.is_finite()) {
                return Err(Error::config(
                    "scan.axes",
                    format!("axis {} has non-finite value {v}", axis.parameter),
                ));
            }
            total = total.saturating_mul(axis.values.len() as u64);
        }
        if total > self.cap {
            return Err(Error::GridTooLarge {
                evaluations: total,
                cap: self.cap,
            });
        }
        Ok(total)
    }

    /// Axis coordinates of flat index `index` (row-major).
    pub fn coordinates(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.axes.len()];
        for (slot, axis) in coords.iter_mut().zip(&self.axes).rev() {
            let len = axis.values.len();
            *slot = index % len;
            index /= len;
        }
        coords
    }

    /// `(parameter, value)` pairs at flat index `index`.
    pub fn parameters(&self, index: usize) -> Vec<(ScanParameter, f64)> {
        self.coordinates(index)
            .into_iter()
            .zip(&self.axes)
            .map(|(k, axis)| (axis.parameter, axis.values[k]))
            .collect()
    }
}

/// Fisher information over a dense parameter grid.
#[derive(Clone, Debug, Serialize)]
pub struct FisherScanResult {
    pub axes: Vec<ScanAxis>,
    /// Row-major, 1/Hz².
    pub values: Vec<f64>,
    pub argmax_index: usize,
    pub argmax: Vec<(ScanParameter, f64)>,
    pub max_fisher: f64,
    /// `1/√max`, Hz.
    pub crb_hz: f64,
    /// Points where the `P_g(1-P_g)` floor was applied with non-zero slope.
    pub guarded_points: usize,
    /// Points whose first pulse transfers nothing (`F = 0`).
    pub empty_preparations: usize,
}

/// Pulse settings after applying one grid point to the template.
fn apply_point(
    template: &FisherQuery,
    params: &[(ScanParameter, f64)],
) -> Result<(PulseConfig, PulseConfig, f64)> {
    let mut pulse1 = template.protocol.pulse1.clone();
    let mut pulse2 = template.protocol.pulse2.clone();
    let mut wait = template.protocol.wait_s;
    for &(param, value) in params {
        match param {
            ScanParameter::Delta1Hz => pulse1.detuning_hz = value,
            ScanParameter::Delta2Hz => pulse2.detuning_hz = value,
            ScanParameter::G1Hz => pulse1 = retune(&pulse1, value, "scan.g1_hz")?,
            ScanParameter::G2Hz => pulse2 = retune(&pulse2, value, "scan.g2_hz")?,
            ScanParameter::WaitS => {
                if value < 0.0 {
                    return Err(Error::config("scan.wait_s", format!("must be >= 0, got {value}")));
                }
                wait = value;
            }
        }
    }
    Ok((pulse1, pulse2, wait))
}

/// π pulse with effective coupling `g`; the bare coupling scales along.
fn retune(pulse: &PulseConfig, g: f64, field: &str) -> Result<PulseConfig> {
    if !(g > 0.0) {
        return Err(Error::config(field, format!("must be > 0, got {g}")));
    }
    let mut out = PulseConfig::pi_pulse(pulse.detuning_hz, g, pulse.sideband)?;
    out.bare_hz = match pulse.bare_hz {
        Some(bare) if pulse.g_eff_hz > 0.0 => Some(bare * g / pulse.g_eff_hz),
        _ => None,
    };
    Ok(out)
}

fn pulse_key(p: &PulseConfig) -> [u64; 5] {
    [
        p.detuning_hz.to_bits(),
        p.g_eff_hz.to_bits(),
        p.duration_s.to_bits(),
        p.sideband as u64,
        p.bare_hz.map_or(u64::MAX, f64::to_bits),
    ]
}

/// Dense Fisher-information scan around `template`.
///
/// Points sharing a first pulse share one preparation. A first pulse that
/// transfers no population yields `F = 0` at its points.
pub fn scan(spec: &ScanSpec, template: &FisherQuery) -> Result<FisherScanResult> {
    let total = spec.evaluations()? as usize;
    template.validate()?;
    let base = FisherEvaluator::new(template)?;
    scan_with(spec, &base, template, total)
}

/// Scan reusing an existing evaluator (ensemble and template preparation).
pub fn scan_with_evaluator(spec: &ScanSpec, evaluator: &FisherEvaluator) -> Result<FisherScanResult> {
    let total = spec.evaluations()? as usize;
    let template = FisherQuery {
        protocol: evaluator.protocol().config().clone(),
        n_atoms: evaluator.n_atoms(),
    };
    scan_with(spec, evaluator, &template, total)
}

fn scan_with(
    spec: &ScanSpec,
    base: &FisherEvaluator,
    template: &FisherQuery,
    total: usize,
) -> Result<FisherScanResult> {
    let settings = (0..total)
        .map(|i| apply_point(template, &spec.parameters(i)))
        .collect::<Result<Vec<_>>>()?;

    // Group by first pulse, in order of first appearance.
    let mut group_of: HashMap<[u64; 5], usize> = HashMap::new();
    let mut groups: Vec<(PulseConfig, Vec<usize>)> = Vec::new();
    for (i, (p1, _, _)) in settings.iter().enumerate() {
        let g = *group_of.entry(pulse_key(p1)).or_insert_with(|| {
            groups.push((p1.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[g].1.push(i);
    }

    let theta = base.theta_hz();
    let n_atoms = base.n_atoms();
    let mut points: Vec<Option<FisherPoint>> = vec![None; total];
    let mut empty_preparations = 0;
    for (pulse1, indices) in &groups {
        let protocol = if *pulse1 == base.protocol().config().pulse1 {
            base.protocol().clone()
        } else {
            match base.protocol().with_pulse1(pulse1.clone()) {
                Ok(p) => p,
                Err(Error::DegeneratePreparation { .. }) => {
                    empty_preparations += indices.len();
                    for &i in indices {
                        points[i] = Some(FisherPoint {
                            fisher: 0.0,
                            pg: 0.0,
                            pe: 0.0,
                            dpg_dtheta: 0.0,
                            guarded: false,
                        });
                    }
                    continue;
                }
                Err(e) => return Err(e),
            }
        };
        let evaluator = FisherEvaluator::from_parts(protocol, n_atoms);
        let group_points = indices
            .par_iter()
            .map(|&i| {
                let (_, pulse2, wait) = &settings[i];
                let protocol: &Protocol = evaluator.protocol();
                let probe = protocol.probe_for(pulse2)?;
                Ok(FisherPoint::from_protocol(
                    protocol.evaluate(&probe, *wait, theta),
                    n_atoms,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        for (&i, p) in indices.iter().zip(group_points) {
            points[i] = Some(p);
        }
    }

    let points: Vec<FisherPoint> = points.into_iter().map(|p| p.expect("every grid point evaluated")).collect();
    let values: Vec<f64> = points.iter().map(|p| p.fisher).collect();
    let (argmax_index, max_fisher) = first_argmax(&values);
    Ok(FisherScanResult {
        axes: spec.axes.clone(),
        argmax: spec.parameters(argmax_index),
        argmax_index,
        max_fisher,
        crb_hz: 1.0 / max_fisher.sqrt(),
        guarded_points: points.iter().filter(|p| p.guarded).count(),
        empty_preparations,
        values,
    })
}

/// Index and value of the largest entry; ties go to the earliest index.
pub(crate) fn first_argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_coordinates() {
        let spec = ScanSpec::new(vec![
            ScanAxis::new(ScanParameter::Delta1Hz, vec![1.0, 2.0]),
            ScanAxis::new(ScanParameter::Delta2Hz, vec![10.0, 20.0, 30.0]),
        ]);
        assert_eq!(spec.evaluations().unwrap(), 6);
        assert_eq!(spec.coordinates(0), vec![0, 0]);
        assert_eq!(spec.coordinates(1), vec![0, 1]);
        assert_eq!(spec.coordinates(3), vec![1, 0]);
        assert_eq!(
            spec.parameters(5),
            vec![(ScanParameter::Delta1Hz, 2.0), (ScanParameter::Delta2Hz, 30.0)]
        );
    }

    #[test]
    fn refuses_large_grids() {
        let spec = ScanSpec::new(vec![
            ScanAxis::linspace(ScanParameter::Delta1Hz, -1.0, 1.0, 5000),
            ScanAxis::linspace(ScanParameter::Delta2Hz, -1.0, 1.0, 5000),
        ]);
        match spec.evaluations() {
            Err(Error::GridTooLarge { evaluations, cap }) => {
                assert_eq!(evaluations, 25_000_000);
                assert_eq!(cap, DEFAULT_GRID_CAP);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_axes() {
        let dup = ScanSpec::new(vec![
            ScanAxis::new(ScanParameter::WaitS, vec![1.0]),
            ScanAxis::new(ScanParameter::WaitS, vec![2.0]),
        ]);
        assert!(dup.evaluations().is_err());
        let nan = ScanSpec::new(vec![ScanAxis::new(ScanParameter::WaitS, vec![f64::NAN])]);
        assert!(nan.evaluations().is_err());
    }

    #[test]
    fn argmax_prefers_first_tie() {
        assert_eq!(first_argmax(&[1.0, 3.0, 3.0, 2.0]), (1, 3.0));
        assert_eq!(first_argmax(&[0.0, 0.0]), (0, 0.0));
    }

    #[test]
    fn retune_scales_bare_coupling() {
        let mut p = PulseConfig::pi_pulse(5.0, 60.0, -1).unwrap();
        p.bare_hz = Some(120.0);
        let q = retune(&p, 30.0, "g").unwrap();
        assert_eq!(q.bare_hz, Some(60.0));
        assert_eq!(q.duration_s, 0.5 / 30.0);
        assert_eq!(q.detuning_hz, 5.0);
    }
}
