//! Fisher information of the drift frequency over both clock-laser
//! detunings, on the zeroth sideband.
//!
//! cargo run --release --example fisher_map

use superbloch::io::ConfigSources;
use superbloch::metrology::{scan, ScanAxis, ScanParameter, ScanSpec};

fn main() -> superbloch::Result<()> {
    let cfg = ConfigSources {
        preset: Some("fisher-map".into()),
        file: None,
        overrides: vec!["lattice.n_sites=500".into(), "lattice.s_max=100".into()],
    }
    .load()?;
    let query = cfg.fisher_query()?;
    let n = 21;
    let spec = ScanSpec::new(vec![
        ScanAxis::linspace(ScanParameter::Delta1Hz, -200.0, 200.0, n),
        ScanAxis::linspace(ScanParameter::Delta2Hz, -200.0, 200.0, n),
    ]);
    let result = scan(&spec, &query)?;
    println!(
        "max F = {:.4e} Hz^-2 at {:?}, Cramer-Rao bound {:.3e} Hz",
        result.max_fisher, result.argmax, result.crb_hz
    );
    println!("rows: delta1 from -200 to 200 Hz; columns: delta2; shading F/F_max");
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    for row in result.values.chunks(n) {
        let line: String = row
            .iter()
            .map(|f| shades[((f / result.max_fisher) * 9.0).round() as usize])
            .flat_map(|c| [c, c])
            .collect();
        println!("|{line}|");
    }
    Ok(())
}
