//! Invariants of the model, ensemble, protocol, Fisher information and the
//! reference integrator.

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use proptest::prelude::*;

use superbloch::ensemble::build_ensemble;
use superbloch::io::{ConfigSources, RunConfig};
use superbloch::metrology::{scan, FisherEvaluator, FisherPoint, FisherQuery, ScanAxis, ScanParameter, ScanSpec};
use superbloch::model::{
    bessel_j, rabi_factor, AtomSpecies, DriveConfig, EffectiveModel, LatticeEnsembleConfig, PulseConfig,
};
use superbloch::oracles::{evolve_two_level, quad_coefficient, romberg, PhaseKind, PhaseModulation, TwoLevelSim};
use superbloch::spectroscopy::{prepare, Protocol};

fn preset(name: &str, overrides: &[&str]) -> RunConfig {
    ConfigSources {
        preset: Some(name.into()),
        file: None,
        overrides: overrides.iter().map(|s| s.to_string()).collect(),
    }
    .load()
    .unwrap()
}

/// Readout protocol at a reduced ensemble, shared across cases.
fn readout() -> &'static Protocol {
    static CELL: OnceLock<Protocol> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = preset("sbo-readout", &["lattice.n_sites=200", "lattice.s_max=40"]);
        Protocol::new(cfg.protocol().unwrap()).unwrap()
    })
}

fn fisher_map() -> &'static FisherEvaluator {
    static CELL: OnceLock<FisherEvaluator> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = preset("fisher-map", &["lattice.n_sites=256", "lattice.s_max=40"]);
        FisherEvaluator::new(&cfg.fisher_query().unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detuning_is_dispersion_difference(
        q in -PI..PI,
        s in 0u32..500,
        m in -3i32..=3,
        delta in -3000.0..3000.0f64,
        j in 1.0..300.0f64,
        f1_norm in 0.05..1.0f64,
        f1_arg in -PI..PI,
    ) {
        let lattice = LatticeEnsembleConfig::new(j, 0.1, 100.0, 64, 500, 1e-6).unwrap();
        let drive = DriveConfig::new(None, 1500.0, 1, 0.0).unwrap();
        let model = EffectiveModel::with_hopping_factor(
            AtomSpecies::sr87_reference(), drive, lattice, Complex64::from_polar(f1_norm, f1_arg),
        ).unwrap();
        let phi = model.soc_phase();
        let lhs = model.generalized_detuning_hz(q, s, m, delta) - (delta + m as f64 * 1500.0);
        let rhs = model.dispersion_hz(q + phi, s) - model.dispersion_hz(q, s);
        let scale = model.lattice().effective_hopping_hz(s).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(delta.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn dispersion_is_periodic(q in -PI..PI, s in 0u32..100, f1_arg in -PI..PI) {
        let lattice = LatticeEnsembleConfig::new(80.0, 0.1, 100.0, 64, 100, 1e-6).unwrap();
        let drive = DriveConfig::new(None, 874.3, 1, 0.0).unwrap();
        let model = EffectiveModel::with_hopping_factor(
            AtomSpecies::sr87_reference(), drive, lattice, Complex64::from_polar(0.5, f1_arg),
        ).unwrap();
        // q + 2π is itself rounded, so equality holds to the rounding of q
        let a = model.dispersion_hz(q, s);
        let b = model.dispersion_hz(q + TAU, s);
        prop_assert!((a - b).abs() <= 4.0 * 80.0 * 16.0 * f64::EPSILON * 2.0);
    }

    #[test]
    fn rabi_factors_satisfy_parseval(amplitude in 0.0..20_000.0f64, nu_s in 500.0..5000.0f64) {
        let species = AtomSpecies::sr87_reference();
        let b = species.soc_phase() * amplitude / (TAU * nu_s);
        prop_assume!(b.abs() <= 10.0);
        let drive = DriveConfig::cosine(amplitude, nu_s, 1, 0.0).unwrap();
        let total: f64 = (-40..=40).map(|m| rabi_factor(&drive, &species, m).unwrap().norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn ensemble_weights_are_normalised(
        j in 1.0..200.0f64,
        c in 0.0..0.5f64,
        nu_r in 10.0..500.0f64,
        n in 2usize..300,
        s_max in 0u32..300,
        t_k in 1e-8..1e-5f64,
    ) {
        let lattice = LatticeEnsembleConfig::new(j, c, nu_r, n, s_max, t_k).unwrap();
        let model = EffectiveModel::new(
            AtomSpecies::sr87_reference(), DriveConfig::cosine(5000.0, 1500.0, 1, 0.0).unwrap(), lattice,
        ).unwrap();
        let ensemble = build_ensemble(&model).unwrap();
        let total: f64 = ensemble.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn reduced_weights_fall_with_radial_level(
        j in 1.0..40.0f64,
        nu_r in 100.0..400.0f64,
        t_k in 1e-8..1e-6f64,
        s in 0u32..40,
        jq in 0usize..64,
    ) {
        // 2 J |F1| < ν_r for the cosine drive below
        let lattice = LatticeEnsembleConfig::new(j, 0.1, nu_r, 64, 41, t_k).unwrap();
        let model = EffectiveModel::new(
            AtomSpecies::sr87_reference(), DriveConfig::cosine(5000.0, 1500.0, 1, 0.0).unwrap(), lattice,
        ).unwrap();
        prop_assume!(2.0 * model.lattice().effective_hopping_hz(41) * model.hopping_factor().norm() < nu_r);
        let ensemble = build_ensemble(&model).unwrap();
        let lower = ensemble.weight(s, jq) / (s + 1) as f64;
        let upper = ensemble.weight(s + 1, jq) / (s + 2) as f64;
        prop_assert!(upper < lower || (upper == 0.0 && lower == 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn probabilities_stay_in_unit_interval(
        delta1 in -2500.0..2500.0f64,
        delta2 in -2500.0..2500.0f64,
        g in 5.0..300.0f64,
        t in 0.0..2.0f64,
    ) {
        let base = readout();
        let pulse1 = PulseConfig::pi_pulse(delta1, g, -1).unwrap();
        let Ok(protocol) = base.with_pulse1(pulse1) else { return Ok(()); };
        let mass: f64 = protocol.prepared().weights.iter().sum();
        prop_assert!(mass <= 1.0 + 1e-12);
        let point = protocol.evaluate(protocol.probe(), t, 5.0);
        for p in [point.pg, point.pe, protocol.ground_probability(delta2, t)] {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p), "{}", p);
        }
    }

    #[test]
    fn readout_repeats_every_sbo_period(delta2 in -2500.0..2500.0f64, t in 0.0..1.0f64, k in 1u32..20) {
        let protocol = readout();
        let period = 1.0 / protocol.config().model.drive().delta_nu_hz();
        let a = protocol.ground_probability(delta2, t);
        let b = protocol.ground_probability(delta2, t + k as f64 * period);
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn fisher_is_nonnegative_and_linear_in_atoms(t in 0.5..40.0f64, n_atoms in 1.0..1e7f64) {
        let evaluator = fisher_map();
        let point = evaluator.protocol().evaluate(evaluator.protocol().probe(), t, evaluator.theta_hz());
        let one = FisherPoint::from_protocol(point, 1.0);
        let many = FisherPoint::from_protocol(point, n_atoms);
        prop_assert!(one.fisher >= 0.0);
        prop_assert!((many.fisher - n_atoms * one.fisher).abs() <= 1e-15 * many.fisher);
    }

    #[test]
    fn fisher_scales_with_square_of_same_phase_time(t in 0.5..40.0f64, k in 1u32..50) {
        let evaluator = fisher_map();
        let later = t + k as f64 / evaluator.theta_hz();
        let a = evaluator.at_wait(t);
        let b = evaluator.at_wait(later);
        prop_assume!(a.fisher > 0.0 && !a.guarded);
        prop_assert!((b.fisher * t * t / (a.fisher * later * later) - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn readout_halves_period_at_sideband_centres() {
    let protocol = readout();
    let half = 0.5 / protocol.config().model.drive().delta_nu_hz();
    for delta2 in [-2000.0, 0.0, 2000.0] {
        for i in 0..20 {
            let t = i as f64 * 0.01;
            let a = protocol.ground_probability(delta2, t);
            let b = protocol.ground_probability(delta2, t + half);
            assert!((a - b).abs() < 1e-3, "delta2={delta2} t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn narrower_preparation_concentrates_quasi_momentum() {
    let cfg = preset("sbo-readout", &["lattice.n_sites=2000", "lattice.s_max=4"]);
    let model = cfg.model().unwrap();
    let ensemble = build_ensemble(&model).unwrap();
    let amplitude = model.detuning_amplitude_hz(0);
    let nu_s = model.drive().nu_s_hz();
    let floor = 10.0 * model.drive().delta_nu_hz();
    let grid = ensemble.q_grid().to_vec();
    // Rabi sidelobes sweep across the band as the pulse lengthens, so the
    // spread is only monotone between octave steps, not between nearby g
    let mut couplings: Vec<f64> = (0..).map(|k| amplitude / 2f64.powi(k)).take_while(|&g| g > floor).collect();
    couplings.push(floor);
    let mut previous = f64::INFINITY;
    for g in couplings {
        let pulse = PulseConfig::pi_pulse(nu_s - amplitude, g, -1).unwrap();
        let variance = prepare(&model, &ensemble, &pulse).unwrap().circular_variance(&grid);
        assert!(variance < previous, "g={g}: {variance} >= {previous}");
        previous = variance;
    }
}

#[test]
fn distant_sidebands_do_not_change_readout() {
    let protocol = readout();
    let wider = Protocol::with_ensemble(
        protocol.config().clone().with_sidebands(vec![-2, -1, 0, 1, 2]).unwrap(),
        Arc::clone(protocol.ensemble()),
    )
    .unwrap();
    for delta2 in [-2250.0, -2000.0, -100.0, 0.0, 1900.0] {
        for t in [0.0, 0.03, 0.11] {
            let a = protocol.ground_probability(delta2, t);
            let b = wider.ground_probability(delta2, t);
            assert!((a - b).abs() < 1e-3, "delta2={delta2} t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn flat_ensemble_fisher_map_is_point_symmetric() {
    let cfg = preset(
        "fisher-map",
        &["lattice.n_sites=4000", "lattice.s_max=0", "lattice.temperature_k=1e3"],
    );
    let query: FisherQuery = cfg.fisher_query().unwrap();
    let evaluate = |d1: f64, d2: f64| {
        let mut q = query.clone();
        q.protocol.pulse1 = q.protocol.pulse1.with_detuning(d1);
        q.protocol.pulse2 = q.protocol.pulse2.with_detuning(d2);
        FisherEvaluator::new(&q).unwrap().evaluate().fisher
    };
    for (d1, d2) in [(40.0, -60.0), (100.0, 20.0), (-150.0, 80.0), (10.0, 10.0)] {
        let a = evaluate(d1, d2);
        let b = evaluate(-d1, -d2);
        assert!((a - b).abs() <= 1e-3 * a.max(b), "({d1}, {d2}): {a} vs {b}");
    }
}

#[test]
fn cramer_rao_bound_matches_scan_maximum() {
    let cfg = preset("fisher-map", &["lattice.n_sites=128", "lattice.s_max=10"]);
    let spec = ScanSpec::new(vec![
        ScanAxis::linspace(ScanParameter::Delta1Hz, -100.0, 100.0, 5),
        ScanAxis::linspace(ScanParameter::Delta2Hz, -100.0, 100.0, 5),
    ]);
    let result = scan(&spec, &cfg.fisher_query().unwrap()).unwrap();
    assert!((result.crb_hz * result.max_fisher.sqrt() - 1.0).abs() <= 2.0 * f64::EPSILON);
}

#[test]
fn q_marginal_converges_with_grid_refinement() {
    let moment = |n: usize| {
        let cfg = preset("sideband-spectrum", &[&format!("lattice.n_sites={n}")]);
        let ensemble = build_ensemble(&cfg.model().unwrap()).unwrap();
        let marginal = ensemble.q_marginal();
        // Riemann sums at different N approximate the same integral once
        // rescaled by the grid density
        marginal.iter().zip(ensemble.q_grid()).map(|(w, q)| w * q.cos()).sum::<f64>()
    };
    let coarse = moment(1000);
    let fine = moment(2000);
    assert!((coarse - fine).abs() < 1e-6, "{coarse} vs {fine}");
}

fn sideband_sim(step_fraction: f64, duration_s: f64) -> TwoLevelSim {
    let species = AtomSpecies::sr87_reference();
    TwoLevelSim {
        coupling_hz: 100.0,
        detuning_hz: 2000.0,
        phase_modulation: PhaseModulation::Cosine {
            amplitude_hz: 5000.0,
            nu_s_hz: 2000.0,
            soc_phase: species.soc_phase(),
        },
        step_s: step_fraction / 2000.0,
        duration_s,
        record_every: usize::MAX,
    }
}

#[test]
fn integrator_conserves_norm_over_many_periods() {
    let trace = evolve_two_level(&sideband_sim(1.0 / 2000.0, 1e4 / 2000.0)).unwrap();
    assert!(trace.max_norm_drift <= 1e-9, "{}", trace.max_norm_drift);
}

#[test]
fn integrator_converges_at_fourth_order() {
    let last = |fraction: f64| *evolve_two_level(&sideband_sim(fraction, 0.02)).unwrap().excited.last().unwrap();
    let (p1, p2, p4) = (last(1e-3), last(5e-4), last(2.5e-4));
    assert!((p1 - p2).abs() < 1e-8, "{p1} vs {p2}");
    let ratio = (p1 - p2) / (p2 - p4);
    assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
}

#[test]
fn quadrature_error_estimates_are_conservative() {
    type Case<'a> = (&'a dyn Fn(f64) -> Complex64, f64, f64, Complex64);
    let cases: [Case; 3] = [
        (&|x: f64| Complex64::new(x.exp(), 0.0), 0.0, 1.0, Complex64::new(1f64.exp() - 1.0, 0.0)),
        (&|x: f64| Complex64::from_polar(1.0, 3.0 * x), 0.0, 1.0, (Complex64::from_polar(1.0, 3.0) - 1.0) / Complex64::new(0.0, 3.0)),
        (&|x: f64| Complex64::new(1.0 / (1.0 + x * x), 0.0), 0.0, 1.0, Complex64::new(PI / 4.0, 0.0)),
    ];
    for (f, a, b, exact) in cases {
        let estimate = romberg(f, a, b, 1e-12).unwrap();
        assert!((estimate.value - exact).norm() <= estimate.error.max(4.0 * f64::EPSILON));
    }
    let species = AtomSpecies::sr87_reference();
    for (amplitude, nu_s) in [(5000.0, 2000.0), (12000.0, 900.0)] {
        let waveform = superbloch::model::Waveform::Cosine { amplitude_hz: amplitude };
        let b = -species.soc_phase() * amplitude / (TAU * nu_s);
        for m in -3..=3 {
            let estimate = quad_coefficient(&waveform, nu_s, PhaseKind::rabi(&species, m)).unwrap();
            let exact = bessel_j(m, b).unwrap();
            assert!((estimate.value - exact).norm() <= estimate.error.max(1e-15), "m={m}");
        }
    }
}
