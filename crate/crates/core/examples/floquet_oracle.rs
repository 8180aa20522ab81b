//! Check the sideband Rabi frequency of the effective model against a direct
//! time-domain integration of a phase-modulated two-level atom.
//!
//! cargo run --release --example floquet_oracle

use std::f64::consts::PI;

use superbloch::model::{bessel_j, AtomSpecies};
use superbloch::oracles::{evolve_two_level, fit_rabi_frequency, PhaseModulation, TwoLevelSim};

fn main() -> superbloch::Result<()> {
    let species = AtomSpecies::sr87_reference();
    let (amplitude, nu_s, g) = (5000.0, 2000.0, 40.0);
    let modulation = species.soc_phase() * amplitude / (2.0 * PI * nu_s);
    println!("modulation index {modulation:.4}, bare coupling {g} Hz\n");
    println!("{:>3} {:>12} {:>12} {:>10}", "m", "g|J_m|", "fitted", "rel.err");
    for m in -2..=2 {
        let predicted = g * bessel_j(m, modulation)?.abs();
        let sim = TwoLevelSim {
            coupling_hz: g,
            detuning_hz: -(m as f64) * nu_s,
            phase_modulation: PhaseModulation::Cosine {
                amplitude_hz: amplitude,
                nu_s_hz: nu_s,
                soc_phase: species.soc_phase(),
            },
            step_s: 1.0 / (1000.0 * nu_s),
            duration_s: 3.0 / predicted,
            record_every: 20,
        };
        let trace = evolve_two_level(&sim)?;
        let fitted = fit_rabi_frequency(&trace.times, &trace.excited, 0.5 * predicted, 1.5 * predicted)?;
        println!(
            "{m:>3} {predicted:>12.4} {fitted:>12.4} {:>10.2e}",
            (fitted / predicted - 1.0).abs()
        );
    }
    Ok(())
}
