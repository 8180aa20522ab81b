//! Configuration files, presets, result files and the command line tool.

pub mod cli;
mod config;
mod output;
mod parse;
mod presets;

pub use config::{
    AxisSection, DriveSection, FisherSection, GravitySection, LatticeSection, LengthKind,
    OptimizeSection, OracleSection, OutputSection, ProtocolSection, PulseSection, RunConfig,
    SboSection, ScanSection, SpectrumSection, SpeciesSection, WaveformKind,
};
pub use output::{format_value, sidecar_path, Sidecar, Table};
pub use parse::{
    apply_override, load_table, merge_tables, parse_config, parse_config_str, to_toml_string,
    ConfigSources,
};
pub use presets::{preset, Preset, PRESETS};
