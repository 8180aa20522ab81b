//! Period averages that renormalise the lattice hopping and the clock coupling.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::bessel::bessel_j;
use super::drive::{DriveConfig, Waveform};
use super::quadrature::period_average;
use super::species::AtomSpecies;
use crate::{Error, Result};

fn waveform(drive: &DriveConfig) -> Result<&Waveform> {
    drive.waveform.as_ref().ok_or_else(|| {
        Error::config(
            "drive.waveform",
            "a drive waveform is required to compute Floquet coefficients",
        )
    })
}

/// `i^k` for integer `k`.
fn i_pow(k: i32) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Hopping renormalisation `𝓕_{l-l'}` for a hop of `hop_distance` sites.
///
/// The phase accumulated by a hop is
/// `(l-l') [π Δν(t) / (4 E_r/h) + 2π n ν_s t]`; its period average is
/// returned. For a cosine drive this is `i^{dn} J_{dn}(d π ν_a / (4 E_r/h))`
/// with `d = l - l'`, i.e. the real Bessel value up to the gauge phase `i^{dn}`
/// fixed by the cosine's time origin.
pub fn hopping_factor(drive: &DriveConfig, species: &AtomSpecies, hop_distance: i32) -> Result<Complex64> {
    let kappa = PI / (4.0 * species.recoil_hz());
    let n = drive.n_res();
    match waveform(drive)? {
        Waveform::Cosine { amplitude_hz } => {
            let order = hop_distance * n;
            let x = hop_distance as f64 * kappa * amplitude_hz;
            Ok(i_pow(order) * bessel_j(order, x)?)
        }
        w @ Waveform::Tabulated(_) => {
            let nu_s = drive.nu_s_hz();
            let d = hop_distance as f64;
            period_average(
                |t| {
                    let phase = d * (kappa * w.value(nu_s, t) + TAU * n as f64 * nu_s * t);
                    Complex64::from_polar(1.0, phase)
                },
                drive.period_s(),
                w.pieces(),
            )
        }
    }
}

/// Sideband Rabi renormalisation `𝓡^m`, the period average of
/// `exp(-i [Φ ∫_0^t Δν dτ + 2π m ν_s t])`.
///
/// Cosine drive: `J_m(-Φ ν_a / (2π ν_s))`, real.
pub fn rabi_factor(drive: &DriveConfig, species: &AtomSpecies, m: i32) -> Result<Complex64> {
    let phi = species.soc_phase();
    let nu_s = drive.nu_s_hz();
    match waveform(drive)? {
        Waveform::Cosine { amplitude_hz } => {
            let x = -phi * amplitude_hz / (TAU * nu_s);
            Ok(Complex64::new(bessel_j(m, x)?, 0.0))
        }
        w @ Waveform::Tabulated(_) => period_average(
            |t| {
                let phase = -(phi * w.integral(nu_s, t) + TAU * m as f64 * nu_s * t);
                Complex64::from_polar(1.0, phase)
            },
            drive.period_s(),
            w.pieces(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::drive::TabulatedWaveform;

    fn sr() -> AtomSpecies {
        AtomSpecies::sr87_reference()
    }

    #[test]
    fn undriven_limits() {
        let d0 = DriveConfig::cosine(0.0, 1500.0, 0, 0.0).unwrap();
        let d1 = DriveConfig::cosine(0.0, 1500.0, 1, 0.0).unwrap();
        assert_eq!(hopping_factor(&d0, &sr(), 1).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(hopping_factor(&d1, &sr(), 1).unwrap().norm(), 0.0);
        assert_eq!(rabi_factor(&d1, &sr(), 0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(rabi_factor(&d1, &sr(), 1).unwrap().norm(), 0.0);
        assert_eq!(rabi_factor(&d1, &sr(), -1).unwrap().norm(), 0.0);
    }

    #[test]
    fn reverse_hop_is_conjugate() {
        let d = DriveConfig::cosine(5000.0, 2000.0, 1, 0.0).unwrap();
        let forward = hopping_factor(&d, &sr(), 1).unwrap();
        let backward = hopping_factor(&d, &sr(), -1).unwrap();
        assert!((backward - forward.conj()).norm() < 1e-15);
    }

    #[test]
    fn cosine_rabi_factor_is_bessel_of_negative_argument() {
        let d = DriveConfig::cosine(5000.0, 2000.0, 1, 0.0).unwrap();
        let x = sr().soc_phase() * 5000.0 / (TAU * 2000.0);
        let r1 = rabi_factor(&d, &sr(), 1).unwrap();
        assert!((r1.re + bessel_j(1, x).unwrap()).abs() < 1e-15);
        assert_eq!(r1.im, 0.0);
    }

    #[test]
    fn tabulated_cosine_approaches_closed_form() {
        // a finely sampled cosine held piecewise constant is close to the smooth drive
        let samples = (0..4096)
            .map(|k| 5000.0 * (TAU * (k as f64 + 0.5) / 4096.0).cos())
            .collect();
        let tab = DriveConfig::new(
            Some(Waveform::Tabulated(TabulatedWaveform::new(samples).unwrap())),
            2000.0,
            1,
            0.0,
        )
        .unwrap();
        let smooth = DriveConfig::cosine(5000.0, 2000.0, 1, 0.0).unwrap();
        for m in -2..=2 {
            let a = rabi_factor(&tab, &sr(), m).unwrap();
            let b = rabi_factor(&smooth, &sr(), m).unwrap();
            assert!((a - b).norm() < 1e-3, "m={m}: {a} vs {b}");
        }
        let a = hopping_factor(&tab, &sr(), 1).unwrap();
        let b = hopping_factor(&smooth, &sr(), 1).unwrap();
        assert!((a - b).norm() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn missing_waveform_is_a_config_error() {
        let d = DriveConfig::new(None, 874.3, 1, 0.0).unwrap();
        assert!(matches!(rabi_factor(&d, &sr(), 0), Err(Error::Config { .. })));
    }
}
