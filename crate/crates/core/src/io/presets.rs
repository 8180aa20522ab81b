use crate::{Error, Result};

/// Built-in parameter set.
#[derive(Clone, Copy, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub description: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "sideband-spectrum",
        aliases: &["fig2"],
        description: "thermal Rabi spectrum with three Floquet sidebands",
        text: include_str!("../../presets/sideband-spectrum.toml"),
    },
    Preset {
        name: "sbo-readout",
        aliases: &["fig3"],
        description: "two-pulse SBO readout on the m = -1 sideband",
        text: include_str!("../../presets/sbo-readout.toml"),
    },
    Preset {
        name: "fisher-map",
        aliases: &["fig4"],
        description: "Fisher information over both pulse detunings",
        text: include_str!("../../presets/fisher-map.toml"),
    },
    Preset {
        name: "gravimetry",
        aliases: &["fig7"],
        description: "optimal SBO time and gravity accuracy",
        text: include_str!("../../presets/gravimetry.toml"),
    },
];

pub fn preset(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name || p.aliases.contains(&name))
        .ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            Error::config("preset", format!("unknown preset `{name}`; known: {}", known.join(", ")))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_config_str;

    #[test]
    fn every_preset_validates() {
        for p in PRESETS {
            parse_config_str(p.text, p.name).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn aliases_resolve() {
        assert_eq!(preset("fig4").unwrap().name, "fisher-map");
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn spectrum_preset_values() {
        let cfg = parse_config_str(preset("fig2").unwrap().text, "t").unwrap();
        assert_eq!(cfg.lattice.j_nz_hz, 80.0);
        assert_eq!(cfg.pulse1.as_ref().unwrap().g0_hz, Some(80.0));
        assert_eq!(cfg.lattice.nu_r_hz, 100.0);
        assert_eq!(cfg.pulse1.as_ref().unwrap().duration_s, Some(0.005));
        assert_eq!(cfg.lattice.n_sites, 1000);
        assert_eq!(cfg.lattice.temperature_k, 1e-6);
        assert_eq!(cfg.drive.amplitude_hz, Some(5000.0));
        assert_eq!(cfg.drive.nu_s_hz, 1500.0);
    }

    #[test]
    fn fisher_preset_values() {
        let cfg = parse_config_str(preset("fig4").unwrap().text, "t").unwrap();
        let drive = cfg.drive().unwrap();
        assert_eq!(drive.nu_s_hz(), 874.3);
        assert_eq!(drive.delta_nu_hz(), 1.0);
        assert_eq!(cfg.drive.hopping_factor, Some(0.5));
        assert_eq!(cfg.lattice.s_max, Some(500));
    }
}
