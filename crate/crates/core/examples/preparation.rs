//! Momentum-selective preparation: a weak first pulse excites only the
//! quasi-momenta whose generalised detuning is close to zero.
//!
//! cargo run --release --example preparation

use superbloch::ensemble::build_ensemble;
use superbloch::io::ConfigSources;
use superbloch::spectroscopy::prepare;

fn main() -> superbloch::Result<()> {
    let cfg = ConfigSources {
        preset: Some("sbo-readout".into()),
        file: None,
        overrides: vec!["lattice.n_sites=400".into(), "lattice.s_max=20".into()],
    }
    .load()?;
    let model = cfg.model()?;
    let ensemble = build_ensemble(&model)?;
    let amplitude = model.detuning_amplitude_hz(0);
    let nu_s = model.drive().nu_s_hz();
    let base = cfg.pulse1(&model)?;
    println!("detuning amplitude A(0) = {amplitude:.1} Hz");

    // band edge (one lobe) and band centre (two lobes)
    for (label, delta) in [("nu_s - A", nu_s - amplitude), ("nu_s", nu_s)] {
        let state = prepare(&model, &ensemble, &base.with_detuning(delta))?;
        let dist = state.q_distribution();
        let peak = dist.iter().copied().fold(0.0, f64::max);
        println!(
            "\ndelta1 = {label}: prepared fraction {:.4}, circular variance {:.3}",
            state.prep_probability,
            state.circular_variance(ensemble.q_grid())
        );
        for (q, w) in ensemble.q_grid().iter().zip(&dist).step_by(16) {
            println!("{q:>7.3} {}", "#".repeat((w / peak * 50.0).round() as usize));
        }
    }
    Ok(())
}
