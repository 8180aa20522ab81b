//! Thermal Rabi spectrum of a shaken lattice clock, showing the Floquet
//! sidebands at multiples of the drive frequency.
//!
//! cargo run --release --example spectrum

use superbloch::ensemble::build_ensemble;
use superbloch::io::ConfigSources;
use superbloch::spectroscopy::{linear_grid, thermal_spectrum};

fn main() -> superbloch::Result<()> {
    // the full preset uses 1000 sites and 2001 radial levels; trim for speed
    let cfg = ConfigSources {
        preset: Some("sideband-spectrum".into()),
        file: None,
        overrides: vec!["lattice.n_sites=200".into(), "lattice.s_max=200".into()],
    }
    .load()?;
    let model = cfg.model()?;
    let ensemble = build_ensemble(&model)?;
    let probe = cfg.pulse1(&model)?;
    let grid = linear_grid(-2500.0, 2500.0, 10.0)?;
    let spectrum = thermal_spectrum(&model, &ensemble, &probe, &grid, &[-1, 0, 1])?;

    for m in -1..=1 {
        println!("sideband {m:+}: g_eff = {:.2} Hz", probe.coupling_for(&model, m)?);
    }
    println!("{:>10} {:>10}", "delta/Hz", "P_e");
    for (delta, p) in spectrum.abscissa.iter().zip(&spectrum.values).step_by(10) {
        let bar = "#".repeat((p * 200.0).round() as usize);
        println!("{delta:>10.0} {p:>10.4} {bar}");
    }
    Ok(())
}
