//! Ground-state probability after the two-pulse sequence as a function of
//! the wait time. Away from a sideband centre the signal repeats once per
//! super-Bloch period; at the centre it repeats twice as fast.
//!
//! cargo run --release --example sbo_trace

use superbloch::io::ConfigSources;
use superbloch::spectroscopy::Protocol;

fn main() -> superbloch::Result<()> {
    let cfg = ConfigSources {
        preset: Some("sbo-readout".into()),
        file: None,
        overrides: vec!["lattice.n_sites=200".into(), "lattice.s_max=100".into()],
    }
    .load()?;
    let protocol = Protocol::new(cfg.protocol()?)?;
    let period = 1.0 / protocol.config().model.drive().delta_nu_hz();
    println!("SBO period {period:.3} s\n");
    println!("{:>7} {:>14} {:>14}", "t/s", "d2=-2250 Hz", "d2=0 Hz");
    for k in 0..=40 {
        let t = k as f64 * 0.01;
        println!(
            "{t:>7.2} {:>14.5} {:>14.5}",
            protocol.ground_probability(-2250.0, t),
            protocol.ground_probability(0.0, t)
        );
    }
    Ok(())
}
