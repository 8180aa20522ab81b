//! Conversion between local gravity and the force frequency that the drive
//! must match, for both recoil conventions.
//!
//! cargo run --release --example gravity

use superbloch::metrology::{force_frequency_for_gravity, gravity_convert};
use superbloch::model::AtomSpecies;

fn main() -> superbloch::Result<()> {
    let reference = AtomSpecies::sr87_reference();
    let derived = AtomSpecies::sr87();
    for (label, species) in [("E_r/h = 3441 Hz", &reference), ("derived recoil", &derived)] {
        println!(
            "{label:<16} recoil {:.1} Hz, force frequency at g = 9.8: {:.4} Hz",
            species.recoil_hz(),
            force_frequency_for_gravity(species, 9.8)
        );
    }
    // a drive at 875.2 Hz resonant after a 0.1 Hz SBO correction, resolved to 1 mHz
    let result = gravity_convert(&reference, 1, 0.1, 875.2, 1e-3)?;
    println!(
        "\nforce frequency {:.4} Hz -> g = {:.6} m/s^2, relative uncertainty {:.2e}",
        result.force_freq_hz, result.g_value, result.rel_uncertainty
    );
    Ok(())
}
