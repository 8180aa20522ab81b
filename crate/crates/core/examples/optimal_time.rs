//! Best wait time within the second half of an SBO period, and the gravity
//! resolution after waiting further whole periods.
//!
//! cargo run --release --example optimal_time

use superbloch::io::ConfigSources;
use superbloch::metrology::{accuracy_from_point, find_optimal_time};

fn main() -> superbloch::Result<()> {
    let cfg = ConfigSources {
        preset: Some("gravimetry".into()),
        file: None,
        overrides: vec!["lattice.s_max=100".into()],
    }
    .load()?;
    let query = cfg.fisher_query()?;
    let best = find_optimal_time(&query, None, 0.01, &[10.0, 110.0])?;
    println!("t_m = {:.2} s, F = {:.4e} Hz^-2", best.t_m, best.fisher_max);
    let drive = query.protocol.model.drive();
    for (offset, t, point) in &best.offsets {
        let acc = accuracy_from_point(*point, drive);
        println!(
            "t_m + {offset:>5.0} s = {t:>7.2} s: F = {:.4e}, dg/g = {:.3e}",
            point.fisher, acc.rel_uncertainty
        );
    }
    Ok(())
}
