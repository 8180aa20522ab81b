//! Thermal population over radial levels and quasi-momentum.

use rayon::prelude::*;

use crate::model::{BoltzmannEnergy, EffectiveModel};
use crate::numeric::compensated_sum;
use crate::{Error, Result};

/// One (radial level, quasi-momentum) mode of the ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModePoint {
    /// Radial quantum number `s = n_x + n_y`.
    pub s: u32,
    pub q: f64,
    /// Number of `(n_x, n_y)` pairs with `n_x + n_y = s`.
    pub degeneracy: u32,
    /// Energy entering the Boltzmann factor, Hz.
    pub energy_hz: f64,
}

/// Normalised Boltzmann weights on the `(s, q)` grid.
///
/// Points are ordered by `s` ascending, then `q` ascending; the flat index of
/// `(s, j)` is `s * n_sites + j`.
#[derive(Clone, Debug)]
pub struct ThermalEnsemble {
    q_grid: Vec<f64>,
    s_max: u32,
    energies_hz: Vec<f64>,
    weights: Vec<f64>,
    partition_z: f64,
    energy_reference_hz: f64,
    thermal_hz: f64,
}

/// Thermal ensemble for `model`, energies taken from the dressed or bare band
/// as selected by the lattice configuration.
pub fn build_ensemble(model: &EffectiveModel) -> Result<ThermalEnsemble> {
    let lattice = model.lattice();
    lattice.validate()?;
    let q_grid = lattice.q_grid();
    let n = q_grid.len();
    let mut energies = vec![0.0; n * (lattice.s_max as usize + 1)];
    energies
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(s, row)| {
            let s = s as u32;
            for (e, &q) in row.iter_mut().zip(&q_grid) {
                *e = match lattice.boltzmann_energy {
                    BoltzmannEnergy::Dressed => model.dispersion_hz(q, s),
                    BoltzmannEnergy::Bare => model.bare_dispersion_hz(q, s),
                };
            }
        });
    ThermalEnsemble::from_energies(q_grid, lattice.s_max, energies, lattice.thermal_hz())
}

/// Re-express the ensemble relative to its lowest energy.
pub fn shift_ensemble_energy_reference(ensemble: &ThermalEnsemble) -> ThermalEnsemble {
    ensemble.shift_energy_reference()
}

impl ThermalEnsemble {
    /// Ensemble from explicit energies laid out as `s * q_grid.len() + j`.
    ///
    /// The lowest energy is subtracted before exponentiation.
    pub fn from_energies(
        q_grid: Vec<f64>,
        s_max: u32,
        energies_hz: Vec<f64>,
        thermal_hz: f64,
    ) -> Result<Self> {
        if !(thermal_hz.is_finite() && thermal_hz > 0.0) {
            return Err(Error::config(
                "lattice.temperature_k",
                format!("thermal energy must be > 0, got {thermal_hz} Hz"),
            ));
        }
        if q_grid.is_empty() {
            return Err(Error::config("lattice.n_sites", "empty quasi-momentum grid"));
        }
        let n = q_grid.len();
        if energies_hz.len() != n * (s_max as usize + 1) {
            return Err(Error::Numeric(format!(
                "expected {} energies, got {}",
                n * (s_max as usize + 1),
                energies_hz.len()
            )));
        }
        if let Some(bad) = energies_hz.iter().find(|e| !e.is_finite()) {
            return Err(Error::Numeric(format!("non-finite mode energy {bad}")));
        }
        let reference = energies_hz.iter().copied().fold(f64::INFINITY, f64::min);
        let mut weights: Vec<f64> = energies_hz
            .par_iter()
            .enumerate()
            .map(|(i, &e)| {
                let s = (i / n) as f64;
                (s + 1.0) * (-(e - reference) / thermal_hz).exp()
            })
            .collect();
        let z = compensated_sum(weights.iter().copied());
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::Numeric(format!(
                "Boltzmann weights sum to {z}; rescale energies by their minimum or raise the temperature"
            )));
        }
        weights.par_iter_mut().for_each(|w| *w /= z);
        Ok(Self {
            q_grid,
            s_max,
            energies_hz,
            weights,
            partition_z: z,
            energy_reference_hz: reference,
            thermal_hz,
        })
    }

    /// Same weights, with stored energies measured from the lowest one.
    pub fn shift_energy_reference(&self) -> Self {
        let reference = self.energies_hz.iter().copied().fold(f64::INFINITY, f64::min);
        let shifted = self.energies_hz.iter().map(|e| e - reference).collect();
        Self::from_energies(self.q_grid.clone(), self.s_max, shifted, self.thermal_hz)
            .expect("shifted energies of a valid ensemble stay valid")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.q_grid.len()
    }

    pub fn s_max(&self) -> u32 {
        self.s_max
    }

    pub fn q_grid(&self) -> &[f64] {
        &self.q_grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn energies_hz(&self) -> &[f64] {
        &self.energies_hz
    }

    /// `Σ (s+1) exp(-(E - E_ref)/k_B T)` with `E_ref` = [`energy_reference_hz`](Self::energy_reference_hz).
    pub fn partition_z(&self) -> f64 {
        self.partition_z
    }

    pub fn energy_reference_hz(&self) -> f64 {
        self.energy_reference_hz
    }

    pub fn thermal_hz(&self) -> f64 {
        self.thermal_hz
    }

    pub fn weight(&self, s: u32, j: usize) -> f64 {
        self.weights[s as usize * self.n_sites() + j]
    }

    pub fn point(&self, index: usize) -> ModePoint {
        let n = self.n_sites();
        let s = (index / n) as u32;
        ModePoint {
            s,
            q: self.q_grid[index % n],
            degeneracy: s + 1,
            energy_hz: self.energies_hz[index],
        }
    }

    pub fn points(&self) -> impl Iterator<Item = ModePoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Population of each radial level, summed over q.
    pub fn s_marginal(&self) -> Vec<f64> {
        self.weights
            .chunks(self.n_sites())
            .map(|row| compensated_sum(row.iter().copied()))
            .collect()
    }

    /// Population at each grid quasi-momentum, summed over radial levels.
    pub fn q_marginal(&self) -> Vec<f64> {
        let n = self.n_sites();
        (0..n)
            .map(|j| compensated_sum(self.weights.iter().skip(j).step_by(n).copied()))
            .collect()
    }
}
