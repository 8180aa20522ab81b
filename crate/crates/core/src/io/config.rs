//! Run configuration documents.
//!
//! Every physical quantity carries its unit in the key name (`_hz`, `_s`,
//! `_k`, `_m`, `_u`); keys without a suffix are dimensionless. Unknown keys
//! are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::metrology::{FisherQuery, ScanAxis, ScanParameter, ScanSpec, DEFAULT_GRID_CAP};
use crate::model::species::{
    ATOMIC_MASS_UNIT, SR87_MASS_U, SR_CLOCK_WAVELENGTH, SR_LATTICE_WAVELENGTH,
};
use crate::model::{
    AtomSpecies, BoltzmannEnergy, DriveConfig, EffectiveModel, LatticeEnsembleConfig, PulseConfig,
    PulseLength, TabulatedWaveform, Waveform,
};
use crate::spectroscopy::{linear_grid, ProtocolConfig};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub species: SpeciesSection,
    pub drive: DriveSection,
    pub lattice: LatticeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse1: Option<PulseSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse2: Option<PulseSection>,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sbo: Option<SboSection>,
    #[serde(default)]
    pub fisher: FisherSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
    #[serde(default)]
    pub gravity: GravitySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSection {
    #[serde(default = "default_mass_u")]
    pub mass_u: f64,
    #[serde(default = "default_lambda_lattice")]
    pub lambda_lattice_m: f64,
    #[serde(default = "default_lambda_clock")]
    pub lambda_clock_m: f64,
    /// Replaces the recoil frequency derived from mass and wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recoil_hz: Option<f64>,
}

fn default_mass_u() -> f64 {
    SR87_MASS_U
}
fn default_lambda_lattice() -> f64 {
    SR_LATTICE_WAVELENGTH
}
fn default_lambda_clock() -> f64 {
    SR_CLOCK_WAVELENGTH
}

impl Default for SpeciesSection {
    fn default() -> Self {
        Self {
            mass_u: SR87_MASS_U,
            lambda_lattice_m: SR_LATTICE_WAVELENGTH,
            lambda_clock_m: SR_CLOCK_WAVELENGTH,
            recoil_hz: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformKind {
    Cosine,
    Tabulated,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waveform: Option<WaveformKind>,
    /// Cosine amplitude `ν_a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_hz: Option<f64>,
    /// One period of a tabulated waveform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_hz: Option<Vec<f64>>,
    pub nu_s_hz: f64,
    #[serde(default = "default_n_res")]
    pub n_res: i32,
    /// Off-resonance fraction Δ; exclusive with `delta_nu_s_hz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_frac: Option<f64>,
    /// SBO frequency `Δν_s`; exclusive with `delta_frac`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_nu_s_hz: Option<f64>,
    /// Fixes the hopping factor instead of deriving it from the waveform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hopping_factor: Option<f64>,
}

fn default_n_res() -> i32 {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub j_nz_hz: f64,
    #[serde(default)]
    pub c_coeff_hz: f64,
    pub nu_r_hz: f64,
    pub n_sites: usize,
    /// Defaults to the level where the Boltzmann factor drops below 1e-6.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_max: Option<u32>,
    pub temperature_k: f64,
    #[serde(default = "default_sign")]
    pub coupling_sign: i8,
    #[serde(default)]
    pub boltzmann_energy: BoltzmannEnergy,
}

fn default_sign() -> i8 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthKind {
    Pi,
}

/// Clock pulse. Give the coupling either as `g0_hz` (bare) or `g_eff_hz`,
/// the detuning either as `detuning_hz` or as `detuning_amplitudes`, and
/// the length either as `duration_s` or `length = "pi"` (the default).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    #[serde(default)]
    pub sideband: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_eff_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_hz: Option<f64>,
    /// Detuning `-m ν_s + k A₀` with `A₀` the ground radial level's
    /// momentum-dependent detuning amplitude.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_amplitudes: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<LengthKind>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    /// Wait between the pulses; exclusive with `wait_periods`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wait_s: Option<f64>,
    /// Wait as whole drive periods plus `wait_offset_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wait_periods: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wait_offset_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sidebands: Option<Vec<i32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub step_hz: f64,
    #[serde(default = "default_sidebands")]
    pub sidebands: Vec<i32>,
}

fn default_sidebands() -> Vec<i32> {
    vec![-1, 0, 1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SboSection {
    #[serde(default)]
    pub trace_start_s: f64,
    pub trace_stop_s: f64,
    pub trace_step_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FisherSection {
    #[serde(default = "default_atoms")]
    pub n_atoms: f64,
}

fn default_atoms() -> f64 {
    1.0
}

impl Default for FisherSection {
    fn default() -> Self {
        Self { n_atoms: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub parameter: ScanParameter,
    /// Explicit values; otherwise `start`, `stop`, `points`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub axes: Vec<AxisSection>,
    #[serde(default = "default_cap")]
    pub cap: u64,
}

fn default_cap() -> u64 {
    DEFAULT_GRID_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    /// Defaults to `0.5/Δν_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_start_s: Option<f64>,
    /// Defaults to `1/Δν_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_stop_s: Option<f64>,
    pub step_s: f64,
    #[serde(default)]
    pub offsets_s: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravitySection {
    /// Gravity to convert into a force frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_m_s2: Option<f64>,
    /// Uncertainty of the measured `Δν_s`.
    #[serde(default)]
    pub uncertainty_hz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// Bare clock coupling `g`.
    pub g_hz: f64,
    /// Sideband whose resonance `δ = -m ν_s` is driven.
    #[serde(default)]
    pub sideband: i32,
    /// Overrides the resonant detuning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_hz: Option<f64>,
    /// Defaults to `T_s / 2000`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_s: Option<f64>,
    /// Defaults to four effective Rabi periods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    #[serde(default = "default_record")]
    pub record_every: usize,
}

fn default_record() -> usize {
    50
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: String,
    /// File stem; defaults to the subcommand name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

fn default_dir() -> String {
    ".".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            stem: None,
        }
    }
}

fn exclusive<T>(a: Option<T>, b: Option<T>, fa: &str, fb: &str) -> Result<Option<Either<T>>> {
    match (a, b) {
        (Some(_), Some(_)) => Err(Error::config(fa, format!("give either `{fa}` or `{fb}`, not both"))),
        (Some(x), None) => Ok(Some(Either::First(x))),
        (None, Some(y)) => Ok(Some(Either::Second(y))),
        (None, None) => Ok(None),
    }
}

enum Either<T> {
    First(T),
    Second(T),
}

impl RunConfig {
    pub fn species(&self) -> Result<AtomSpecies> {
        let s = &self.species;
        let species = AtomSpecies::new(s.mass_u * ATOMIC_MASS_UNIT, s.lambda_lattice_m, s.lambda_clock_m)?;
        match s.recoil_hz {
            Some(r) => species.with_recoil_override(r),
            None => Ok(species),
        }
    }

    pub fn drive(&self) -> Result<DriveConfig> {
        let d = &self.drive;
        let waveform = match d.waveform {
            None => {
                if d.amplitude_hz.is_some() || d.samples_hz.is_some() {
                    return Err(Error::config(
                        "drive.waveform",
                        "set `waveform` to \"cosine\" or \"tabulated\" when giving its data",
                    ));
                }
                None
            }
            Some(WaveformKind::Cosine) => {
                let a = d
                    .amplitude_hz
                    .ok_or_else(|| Error::config("drive.amplitude_hz", "required for a cosine drive"))?;
                Some(Waveform::Cosine { amplitude_hz: a })
            }
            Some(WaveformKind::Tabulated) => {
                let samples = d
                    .samples_hz
                    .clone()
                    .ok_or_else(|| Error::config("drive.samples_hz", "required for a tabulated drive"))?;
                Some(Waveform::Tabulated(TabulatedWaveform::new(samples)?))
            }
        };
        if d.n_res < 0 {
            return Err(Error::config("drive.n_res", format!("must be >= 0, got {}", d.n_res)));
        }
        match exclusive(d.delta_frac, d.delta_nu_s_hz, "drive.delta_frac", "drive.delta_nu_s_hz")? {
            Some(Either::First(frac)) => DriveConfig::new(waveform, d.nu_s_hz, d.n_res, frac),
            Some(Either::Second(hz)) => DriveConfig::with_detuning_hz(waveform, d.nu_s_hz, d.n_res, hz),
            None => DriveConfig::new(waveform, d.nu_s_hz, d.n_res, 0.0),
        }
    }

    pub fn lattice(&self) -> Result<LatticeEnsembleConfig> {
        let l = &self.lattice;
        let s_max = match l.s_max {
            Some(s) => s,
            None => {
                if !(l.nu_r_hz > 0.0 && l.temperature_k > 0.0) {
                    return Err(Error::config(
                        "lattice.s_max",
                        "required when nu_r_hz or temperature_k is not positive",
                    ));
                }
                LatticeEnsembleConfig::default_s_max(l.nu_r_hz, l.temperature_k)
            }
        };
        let mut cfg = LatticeEnsembleConfig::new(
            l.j_nz_hz,
            l.c_coeff_hz,
            l.nu_r_hz,
            l.n_sites,
            s_max,
            l.temperature_k,
        )?;
        cfg.coupling_sign = l.coupling_sign;
        cfg.boltzmann_energy = l.boltzmann_energy;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn model(&self) -> Result<EffectiveModel> {
        let species = self.species()?;
        let drive = self.drive()?;
        let lattice = self.lattice()?;
        match self.drive.hopping_factor {
            Some(f1) => EffectiveModel::with_hopping_factor(species, drive, lattice, Complex64::new(f1, 0.0)),
            None => EffectiveModel::new(species, drive, lattice),
        }
    }

    pub fn pulse1(&self, model: &EffectiveModel) -> Result<PulseConfig> {
        let section = self
            .pulse1
            .as_ref()
            .ok_or_else(|| Error::config("pulse1", "section is required"))?;
        build_pulse(section, model, "pulse1")
    }

    pub fn pulse2(&self, model: &EffectiveModel) -> Result<PulseConfig> {
        let section = self
            .pulse2
            .as_ref()
            .ok_or_else(|| Error::config("pulse2", "section is required"))?;
        build_pulse(section, model, "pulse2")
    }

    pub fn wait_s(&self, drive: &DriveConfig) -> Result<f64> {
        let p = &self.protocol;
        match (p.wait_s, p.wait_periods) {
            (Some(_), Some(_)) => Err(Error::config(
                "protocol.wait_s",
                "give either `wait_s` or `wait_periods`, not both",
            )),
            (Some(w), None) => {
                if p.wait_offset_s.is_some() {
                    return Err(Error::config("protocol.wait_offset_s", "only used with `wait_periods`"));
                }
                Ok(w)
            }
            (None, Some(k)) => Ok(crate::metrology::SboTime::new(k, p.wait_offset_s.unwrap_or(0.0)).seconds(drive)),
            (None, None) => Ok(p.wait_offset_s.unwrap_or(0.0)),
        }
    }

    pub fn protocol(&self) -> Result<ProtocolConfig> {
        let model = self.model()?;
        self.protocol_with(model)
    }

    pub fn protocol_with(&self, model: EffectiveModel) -> Result<ProtocolConfig> {
        let pulse1 = self.pulse1(&model)?;
        let pulse2 = self.pulse2(&model)?;
        let wait = self.wait_s(model.drive())?;
        let cfg = ProtocolConfig::new(model, pulse1, wait, pulse2)?;
        match &self.protocol.sidebands {
            Some(set) => cfg.with_sidebands(set.clone()),
            None => Ok(cfg),
        }
    }

    pub fn fisher_query(&self) -> Result<FisherQuery> {
        FisherQuery::new(self.protocol()?, self.fisher.n_atoms)
    }

    pub fn spectrum_grid(&self) -> Result<Vec<f64>> {
        let s = self
            .spectrum
            .as_ref()
            .ok_or_else(|| Error::config("spectrum", "section is required"))?;
        linear_grid(s.start_hz, s.stop_hz, s.step_hz)
            .map_err(|e| relabel(e, "spectrum.step_hz"))
    }

    pub fn trace_times(&self) -> Result<Vec<f64>> {
        let s = self
            .sbo
            .as_ref()
            .ok_or_else(|| Error::config("sbo", "section with trace_stop_s and trace_step_s is required"))?;
        linear_grid(s.trace_start_s, s.trace_stop_s, s.trace_step_s)
            .map_err(|e| relabel(e, "sbo.trace_step_s"))
    }

    pub fn scan_spec(&self) -> Result<ScanSpec> {
        let s = self
            .scan
            .as_ref()
            .ok_or_else(|| Error::config("scan", "section is required"))?;
        let axes = s
            .axes
            .iter()
            .enumerate()
            .map(|(i, a)| match (&a.values, a.start, a.stop, a.points) {
                (Some(v), None, None, None) => Ok(ScanAxis::new(a.parameter, v.clone())),
                (None, Some(start), Some(stop), Some(points)) if points >= 1 => {
                    Ok(ScanAxis::linspace(a.parameter, start, stop, points))
                }
                _ => Err(Error::config(
                    format!("scan.axes[{i}]"),
                    "give either `values` or all of `start`, `stop`, `points` (>= 1)",
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScanSpec::new(axes).with_cap(s.cap))
    }

    /// Checks every section that is present against the module invariants.
    pub fn validate(&self) -> Result<()> {
        let model = self.model()?;
        if self.pulse1.is_some() {
            self.pulse1(&model)?;
        }
        if self.pulse2.is_some() {
            self.pulse2(&model)?;
        }
        self.wait_s(model.drive())?;
        if self.pulse1.is_some() && self.pulse2.is_some() {
            self.protocol_with(model.clone())?;
        }
        if self.spectrum.is_some() {
            self.spectrum_grid()?;
        }
        if self.sbo.is_some() {
            self.trace_times()?;
        }
        if !(self.fisher.n_atoms.is_finite() && self.fisher.n_atoms >= 1.0) {
            return Err(Error::config("fisher.n_atoms", "must be >= 1"));
        }
        if self.scan.is_some() {
            self.scan_spec()?.evaluations()?;
        }
        if let Some(o) = &self.optimize {
            if !(o.step_s > 0.0) {
                return Err(Error::config("optimize.step_s", "must be > 0"));
            }
        }
        if !(self.gravity.uncertainty_hz >= 0.0) {
            return Err(Error::config("gravity.uncertainty_hz", "must be >= 0"));
        }
        if let Some(o) = &self.oracle {
            if !(o.g_hz > 0.0) {
                return Err(Error::config("oracle.g_hz", "must be > 0"));
            }
        }
        Ok(())
    }
}

fn relabel(e: Error, field: &str) -> Error {
    match e {
        Error::Config { message, .. } => Error::config(field, message),
        other => other,
    }
}

fn build_pulse(section: &PulseSection, model: &EffectiveModel, name: &str) -> Result<PulseConfig> {
    let m = section.sideband;
    let detuning = match exclusive(
        section.detuning_hz,
        section.detuning_amplitudes,
        &format!("{name}.detuning_hz"),
        &format!("{name}.detuning_amplitudes"),
    )? {
        Some(Either::First(d)) => d,
        Some(Either::Second(k)) => -(m as f64) * model.drive().nu_s_hz() + k * model.detuning_amplitude_hz(0),
        None => 0.0,
    };
    let length = match (section.duration_s, section.length) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                format!("{name}.duration_s"),
                "give either `duration_s` or `length`, not both",
            ))
        }
        (Some(d), None) => PulseLength::Fixed(d),
        (None, _) => PulseLength::Pi,
    };
    let pulse = match exclusive(
        section.g0_hz,
        section.g_eff_hz,
        &format!("{name}.g0_hz"),
        &format!("{name}.g_eff_hz"),
    )? {
        Some(Either::First(g0)) => PulseConfig::from_bare(model, g0, detuning, m, length),
        Some(Either::Second(g)) => match length {
            PulseLength::Fixed(d) => PulseConfig::new(detuning, g, d, m),
            PulseLength::Pi => PulseConfig::pi_pulse(detuning, g, m),
        },
        None => Err(Error::config(format!("{name}.g_eff_hz"), "give `g0_hz` or `g_eff_hz`")),
    };
    pulse.map_err(|e| match e {
        Error::Config { field, message } => {
            let leaf = field.rsplit('.').next().unwrap_or(&field).to_string();
            Error::config(format!("{name}.{leaf}"), message)
        }
        other => other,
    })
}
