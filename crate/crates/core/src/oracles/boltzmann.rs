/// Unevaluated sum `hi + lo` carrying roughly 106 bits.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles (Knuth's TwoSum).
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    pub fn add_f64(self, x: f64) -> Self {
        let (s, e) = Self::two_sum(self.hi, x);
        let (hi, lo) = Self::two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Normalised Boltzmann weights `d_i exp(-(E_i - E_min)/kT) / Z`, with the
/// partition sum accumulated in double-double precision.
pub fn boltzmann_weights_reference(energies_hz: &[f64], degeneracies: &[f64], thermal_hz: f64) -> Vec<f64> {
    assert_eq!(energies_hz.len(), degeneracies.len());
    let e_min = energies_hz.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = energies_hz
        .iter()
        .zip(degeneracies)
        .map(|(&e, &d)| d * (-(e - e_min) / thermal_hz).exp())
        .collect();
    let z = raw.iter().fold(DoubleDouble::default(), |acc, &w| acc.add_f64(w)).value();
    raw.into_iter().map(|w| w / z).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_low_bits() {
        let mut acc = DoubleDouble::new(1.0);
        for _ in 0..1000 {
            acc = acc.add_f64(1e-17);
        }
        let excess = (acc.hi - 1.0) + acc.lo;
        assert!((excess - 1e-14).abs() < 1e-24, "{excess:e}");
        assert_eq!(1.0 + 1e-17, 1.0);
    }

    #[test]
    fn weights_sum_to_one() {
        let w = boltzmann_weights_reference(&[0.0, 100.0, 200.0], &[1.0, 2.0, 3.0], 150.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(w[1] / w[0] - 2.0 * (-100.0f64 / 150.0).exp() < 1e-15);
    }
}
