//! The `sbo` command line tool.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use toml::Value as TomlValue;

use super::config::RunConfig;
use super::output::{sidecar_path, Sidecar, Table};
use super::parse::{load_table, remove_path, set_path, ConfigSources};
use super::presets::PRESETS;
use crate::ensemble::build_ensemble;
use crate::metrology::{
    accuracy_at, accuracy_from_point, find_optimal_time_with, force_frequency_for_gravity,
    gravity_convert, scan_with_evaluator, FisherEvaluator,
};
use crate::model::{AtomSpecies, Waveform};
use crate::oracles::{evolve_two_level, fit_rabi_frequency, PhaseModulation, TwoLevelSim};
use crate::spectroscopy::{prepare, thermal_spectrum, Protocol};
use crate::{Error, Result};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GRID_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sbo", version, about = "Rabi spectroscopy of super-Bloch oscillations")]
pub struct Cli {
    /// Worker threads (falls back to SBO_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in parameter set, applied below the config file.
    #[arg(long)]
    pub preset: Option<String>,
    /// Override a key, e.g. `--set lattice.n_sites=200`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output CSV path; the JSON sidecar goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thermal Rabi spectrum over [spectrum] using [pulse1] as the probe.
    Spectrum(Common),
    /// Momentum distribution prepared by [pulse1].
    Prepare(Common),
    /// Ground-state probability of the two-pulse protocol.
    Sbo {
        #[command(flatten)]
        common: Common,
        /// Wait between the pulses, s (overrides [protocol]).
        #[arg(long)]
        wait: Option<f64>,
        /// Sample over wait time ([sbo]) instead of the probe detuning.
        #[arg(long)]
        trace: bool,
    },
    /// Fisher information at the configured point, or over [scan].
    Fisher(Common),
    /// Wait time of maximum Fisher information ([optimize]).
    Optimize(Common),
    /// Force frequency for a given gravity and gravity from the drive.
    Gravity {
        #[command(flatten)]
        common: Common,
        /// Gravitational acceleration, m/s².
        #[arg(long)]
        g: Option<f64>,
    },
    /// Time-domain two-level check of a sideband Rabi frequency ([oracle]).
    Oracle(Common),
    /// List the built-in presets.
    Presets,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    configure_threads(cli.threads);
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            0
        }
        Err(e) => {
            let mut report = json!({ "error": e.kind(), "message": e.to_string() });
            match &e {
                Error::Config { field, .. } => report["field"] = json!(field),
                Error::GridTooLarge { evaluations, cap } => {
                    report["evaluations"] = json!(evaluations);
                    report["cap"] = json!(cap);
                }
                _ => {}
            }
            eprintln!("{report}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::GridTooLarge { .. } => EXIT_GRID_CAP,
        Error::Config { .. } | Error::Parse(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn configure_threads(flag: Option<usize>) {
    let threads = flag.or_else(|| std::env::var("SBO_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn sources(common: &Common, default_preset: Option<&str>) -> ConfigSources {
    let preset = common
        .preset
        .clone()
        .or_else(|| common.config.is_none().then(|| default_preset.map(String::from)).flatten());
    ConfigSources {
        preset,
        file: common.config.clone(),
        overrides: common.overrides.clone(),
    }
}

fn execute(command: &Command) -> Result<Value> {
    let start = Instant::now();
    let (name, common, cfg) = match command {
        Command::Presets => {
            return Ok(Value::Array(
                PRESETS
                    .iter()
                    .map(|p| json!({ "name": p.name, "aliases": p.aliases, "description": p.description }))
                    .collect(),
            ))
        }
        Command::Spectrum(c) => ("spectrum", c, sources(c, None).load()?),
        Command::Prepare(c) => ("prepare", c, sources(c, None).load()?),
        Command::Sbo { common, wait, .. } => {
            let mut table = sources(common, None).table()?;
            if let Some(w) = wait {
                set_path(&mut table, "protocol.wait_s", TomlValue::Float(*w))?;
                remove_path(&mut table, "protocol.wait_periods");
                remove_path(&mut table, "protocol.wait_offset_s");
            }
            ("sbo", common, load_table(table, "merged configuration")?)
        }
        Command::Fisher(c) => ("fisher", c, sources(c, None).load()?),
        Command::Optimize(c) => ("optimize", c, sources(c, None).load()?),
        Command::Gravity { common, g } => {
            let mut table = sources(common, Some("gravimetry")).table()?;
            if let Some(g) = g {
                set_path(&mut table, "gravity.g_m_s2", TomlValue::Float(*g))?;
            }
            ("gravity", common, load_table(table, "merged configuration")?)
        }
        Command::Oracle(c) => ("oracle", c, sources(c, None).load()?),
    };

    let (table, results, warnings) = match command {
        Command::Spectrum(_) => run_spectrum(&cfg)?,
        Command::Prepare(_) => run_prepare(&cfg)?,
        Command::Sbo { trace, .. } => run_sbo(&cfg, *trace)?,
        Command::Fisher(_) => run_fisher(&cfg)?,
        Command::Optimize(_) => run_optimize(&cfg)?,
        Command::Gravity { .. } => run_gravity(&cfg)?,
        Command::Oracle(_) => run_oracle(&cfg)?,
        Command::Presets => unreachable!("handled above"),
    };

    let csv_path = output_path(common, &cfg, name);
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    table.write_csv(&csv_path)?;
    let sidecar = Sidecar {
        tool: "sbo",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: name.to_string(),
        data_file: csv_path.file_name().map(|f| f.to_string_lossy().into_owned()),
        config: serde_json::to_value(&cfg)?,
        warnings,
        results: results.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let json_path = sidecar_path(&csv_path);
    sidecar.write(&json_path)?;
    Ok(json!({
        "subcommand": name,
        "csv": csv_path.display().to_string(),
        "sidecar": json_path.display().to_string(),
        "results": results,
    }))
}

fn output_path(common: &Common, cfg: &RunConfig, name: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| {
        let stem = cfg.output.stem.clone().unwrap_or_else(|| name.to_string());
        Path::new(&cfg.output.dir).join(format!("{stem}.csv"))
    })
}

type Outcome = (Table, Value, Vec<String>);

fn run_spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let model = cfg.model()?;
    let probe = cfg.pulse1(&model)?;
    let grid = cfg.spectrum_grid()?;
    let sidebands = cfg.spectrum.as_ref().map(|s| s.sidebands.clone()).unwrap_or_default();
    let ensemble = build_ensemble(&model)?;
    let spectrum = thermal_spectrum(&model, &ensemble, &probe, &grid, &sidebands)?;
    let couplings = sidebands
        .iter()
        .map(|&m| Ok(json!({ "sideband": m, "g_eff_hz": probe.coupling_for(&model, m)? })))
        .collect::<Result<Vec<_>>>()?;
    let f1 = model.hopping_factor();
    let results = json!({
        "points": grid.len(),
        "modes": ensemble.len(),
        "hopping_factor": { "re": f1.re, "im": f1.im },
        "couplings": couplings,
        "peak_excitation": spectrum.values.iter().copied().fold(0.0, f64::max),
    });
    Ok((
        Table::columns("detuning_hz", "excitation", &spectrum.abscissa, &spectrum.values),
        results,
        model.drive().warnings(),
    ))
}

fn run_prepare(cfg: &RunConfig) -> Result<Outcome> {
    let model = cfg.model()?;
    let pulse1 = cfg.pulse1(&model)?;
    let ensemble = build_ensemble(&model)?;
    let prepared = prepare(&model, &ensemble, &pulse1)?;
    let dist = prepared.q_distribution();
    let (peak_index, _) = dist
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    let results = json!({
        "prep_probability": prepared.prep_probability,
        "circular_variance": prepared.circular_variance(ensemble.q_grid()),
        "peak_quasimomentum": ensemble.q_grid()[peak_index],
        "pulse1": { "detuning_hz": pulse1.detuning_hz, "g_eff_hz": pulse1.g_eff_hz, "duration_s": pulse1.duration_s, "sideband": pulse1.sideband },
    });
    Ok((
        Table::columns("quasimomentum", "population", ensemble.q_grid(), &dist),
        results,
        model.drive().warnings(),
    ))
}

fn run_sbo(cfg: &RunConfig, trace: bool) -> Result<Outcome> {
    let protocol_cfg = cfg.protocol()?;
    let warnings = protocol_cfg.warnings();
    let protocol = Protocol::new(protocol_cfg)?;
    let spectrum = if trace {
        protocol.time_trace(&cfg.trace_times()?)
    } else {
        protocol.spectrum(&cfg.spectrum_grid()?)
    };
    let results = json!({
        "mode": if trace { "trace" } else { "spectrum" },
        "wait_s": protocol.config().wait_s,
        "delta2_hz": protocol.config().pulse2.detuning_hz,
        "prep_probability": protocol.prepared().prep_probability,
        "sidebands": protocol.config().sideband_set,
        "points": spectrum.values.len(),
    });
    Ok((
        Table::columns(&spectrum.abscissa_label, "ground_probability", &spectrum.abscissa, &spectrum.values),
        results,
        warnings,
    ))
}

fn run_fisher(cfg: &RunConfig) -> Result<Outcome> {
    let query = cfg.fisher_query()?;
    let warnings = query.protocol.warnings();
    let drive = query.protocol.model.drive().clone();
    if cfg.scan.is_some() {
        let spec = cfg.scan_spec()?;
        spec.evaluations()?;
        let evaluator = FisherEvaluator::new(&query)?;
        let result = scan_with_evaluator(&spec, &evaluator)?;
        let mut header: Vec<String> = spec.axes.iter().map(|a| a.parameter.name().to_string()).collect();
        header.push("fisher".into());
        let mut table = Table::new(header);
        for (i, &f) in result.values.iter().enumerate() {
            let mut row: Vec<f64> = spec.parameters(i).into_iter().map(|(_, v)| v).collect();
            row.push(f);
            table.push(row);
        }
        let argmax: serde_json::Map<String, Value> =
            result.argmax.iter().map(|(p, v)| (p.name().to_string(), json!(v))).collect();
        let force = drive.force_frequency_hz();
        let results = json!({
            "points": result.values.len(),
            "argmax": argmax,
            "max_fisher": result.max_fisher,
            "crb_hz": result.crb_hz,
            "rel_uncertainty": result.crb_hz / force,
            "force_freq_hz": force,
            "guarded_points": result.guarded_points,
            "empty_preparations": result.empty_preparations,
        });
        Ok((table, results, warnings))
    } else {
        let evaluator = FisherEvaluator::new(&query)?;
        let wait = query.protocol.wait_s;
        let acc = accuracy_at(&evaluator, wait);
        let p = acc.fisher;
        let mut table = Table::new(["wait_s", "pg", "pe", "dpg_dtheta", "fisher"]);
        table.push(vec![wait, p.pg, p.pe, p.dpg_dtheta, p.fisher]);
        let mut warnings = warnings;
        if p.guarded {
            warnings.push("P_g(1-P_g) fell below 1e-12 with a finite slope; the Fisher value is floored".into());
        }
        Ok((table, serde_json::to_value(acc)?, warnings))
    }
}

fn run_optimize(cfg: &RunConfig) -> Result<Outcome> {
    let o = cfg
        .optimize
        .as_ref()
        .ok_or_else(|| Error::config("optimize", "section is required"))?;
    let query = cfg.fisher_query()?;
    let warnings = query.protocol.warnings();
    let evaluator = FisherEvaluator::new(&query)?;
    let theta = evaluator.theta_hz();
    let window = (
        o.window_start_s.unwrap_or(0.5 / theta),
        o.window_stop_s.unwrap_or(1.0 / theta),
    );
    let best = find_optimal_time_with(&evaluator, Some(window), o.step_s, &o.offsets_s)?;
    let drive = query.protocol.model.drive();
    let offsets: Vec<Value> = best
        .offsets
        .iter()
        .map(|&(dt, t, point)| {
            let acc = accuracy_from_point(point, drive);
            json!({
                "offset_s": dt, "wait_s": t, "fisher": point.fisher,
                "crb_hz": acc.crb_hz, "rel_uncertainty": acc.rel_uncertainty,
            })
        })
        .collect();
    let results = json!({
        "window_s": [window.0, window.1],
        "t_m_s": best.t_m,
        "fisher_max": best.fisher_max,
        "offsets": offsets,
    });
    Ok((Table::columns("wait_s", "fisher", &best.times, &best.values), results, warnings))
}

fn run_gravity(cfg: &RunConfig) -> Result<Outcome> {
    let species = cfg.species()?;
    let drive = cfg.drive()?;
    let mut table = Table::new(["g_m_s2", "force_freq_hz"]);
    let mut results = serde_json::Map::new();
    results.insert("recoil_hz".into(), json!(species.recoil_hz()));
    results.insert("recoil_source".into(), json!(species.recoil_source()));
    if let Some(g) = cfg.gravity.g_m_s2 {
        let force = force_frequency_for_gravity(&species, g);
        let derived = AtomSpecies::new(species.mass_kg(), species.lambda_lattice_m(), species.lambda_clock_m())?;
        let force_derived = force_frequency_for_gravity(&derived, g);
        table.push(vec![g, force]);
        results.insert("g_m_s2".into(), json!(g));
        results.insert("force_freq_hz".into(), json!(force));
        results.insert("force_freq_derived_recoil_hz".into(), json!(force_derived));
        results.insert("derived_recoil_hz".into(), json!(derived.recoil_hz()));
        results.insert("convention_discrepancy".into(), json!(force / force_derived - 1.0));
    }
    let measured = gravity_convert(
        &species,
        drive.n_res(),
        drive.delta_nu_hz(),
        drive.nu_s_hz(),
        cfg.gravity.uncertainty_hz,
    )?;
    table.push(vec![measured.g_value, measured.force_freq_hz]);
    results.insert("from_drive".into(), serde_json::to_value(measured)?);
    Ok((table, Value::Object(results), Vec::new()))
}

fn run_oracle(cfg: &RunConfig) -> Result<Outcome> {
    let o = cfg
        .oracle
        .as_ref()
        .ok_or_else(|| Error::config("oracle", "section is required"))?;
    let model = cfg.model()?;
    let drive = model.drive();
    let amplitude_hz = match &drive.waveform {
        Some(Waveform::Cosine { amplitude_hz }) => *amplitude_hz,
        _ => return Err(Error::config("drive.waveform", "the oracle needs a cosine drive")),
    };
    let nu_s = drive.nu_s_hz();
    let predicted = model.sideband_coupling_hz(o.g_hz, o.sideband)?;
    let sim = TwoLevelSim {
        coupling_hz: o.g_hz,
        detuning_hz: o.detuning_hz.unwrap_or(-(o.sideband as f64) * nu_s),
        phase_modulation: PhaseModulation::Cosine {
            amplitude_hz,
            nu_s_hz: nu_s,
            soc_phase: model.soc_phase(),
        },
        step_s: o.step_s.unwrap_or(1.0 / (2000.0 * nu_s)),
        duration_s: o
            .duration_s
            .unwrap_or_else(|| (4.0 / predicted.max(1e-300)).max(2.0 / o.g_hz)),
        record_every: o.record_every,
    };
    let trace = evolve_two_level(&sim)?;
    let fitted = if predicted > 0.0 {
        Some(fit_rabi_frequency(&trace.times, &trace.excited, 0.5 * predicted, 1.5 * predicted)?)
    } else {
        None
    };
    let results = json!({
        "g_hz": o.g_hz,
        "sideband": o.sideband,
        "predicted_hz": predicted,
        "fitted_hz": fitted,
        "relative_deviation": fitted.map(|f| f / predicted - 1.0),
        "max_norm_drift": trace.max_norm_drift,
        "samples": trace.times.len(),
    });
    Ok((
        Table::columns("time_s", "excited_probability", &trace.times, &trace.excited),
        results,
        drive.warnings(),
    ))
}
