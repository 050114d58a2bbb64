use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;

use ks_qutrit::campaign::{run_campaign, Campaign, Number, StateSpec};
use ks_qutrit::counting::{
    click_probabilities, correlation, joint_probabilities, simulate_counts, stream_seed,
    SimulationOptions,
};
use ks_qutrit::optics::{
    apparatus_forward, detection_projectors, measurement_settings, prepare_pure,
    solve_measurement_angles, ApparatusConfig,
};
use ks_qutrit::qutrit::{evaluate_ineq2, evaluate_ineq3, DensityMatrix, Ket};

fn ket_strategy() -> impl Strategy<Value = Ket> {
    (
        (-1.0f64..1.0, -1.0f64..1.0),
        (-1.0f64..1.0, -1.0f64..1.0),
        (-1.0f64..1.0, -1.0f64..1.0),
    )
        .prop_filter_map("nonzero", |(a, b, c)| {
            Ket::new(
                Complex64::new(a.0, a.1),
                Complex64::new(b.0, b.1),
                Complex64::new(c.0, c.1),
            )
            .ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantum_values_are_state_independent(ket in ket_strategy()) {
        let rho = ket.density();
        prop_assert!((evaluate_ineq2(&rho) - 25.0 / 3.0).abs() < 1e-10);
        prop_assert!((evaluate_ineq3(&rho) - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn nonnegative_kets_survive_the_optics(c in prop::array::uniform3(0.0f64..1.0)) {
        prop_assume!(c.iter().any(|&x| x > 1e-6));
        let ket = Ket::from_real(c).unwrap();
        let (t1, t2) = prepare_pure(&ket).unwrap();
        prop_assert!((0.0..=45.0).contains(&t1) && (0.0..=45.0).contains(&t2));
        let rho = apparatus_forward(&ApparatusConfig::pure(t1, t2)).unwrap();
        prop_assert!(rho.fidelity_with(&ket) > 1.0 - 1e-10);
    }

    #[test]
    fn counts_are_consistent(ket in ket_strategy(), eta in 0.05f64..=1.0, seed in any::<u64>()) {
        let rho = ket.density();
        let opts = SimulationOptions::new(2000.0, eta);
        for setting in measurement_settings() {
            let p = click_probabilities(&rho, &setting, eta).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let r = simulate_counts(&rho, &setting, &opts, seed).unwrap();
            prop_assert_eq!(r.n_d1 + r.n_d2 + r.n_d3 + r.n_noclick, r.n_heralds);
            prop_assert_eq!(&r, &simulate_counts(&rho, &setting, &opts, seed).unwrap());
            if r.total_coincidences() > 0 {
                for pair in [(0, 1), (0, 2), (1, 2)] {
                    let jp = joint_probabilities(&r, pair, true).unwrap();
                    let total = jp.p_pp.value + jp.p_pm.value + jp.p_mp.value + jp.p_mm.value;
                    prop_assert!((total - 1.0).abs() < 1e-9);
                    let c = correlation(&jp);
                    prop_assert!(c.value.abs() <= 1.0 + 3.0 * c.sigma + 1e-12);
                }
            }
        }
    }

    #[test]
    fn stream_seeds_are_distinct_per_run(master in any::<u64>()) {
        let mut seen = std::collections::HashSet::new();
        for state in 0..9 {
            for setting in 0..24 {
                prop_assert!(seen.insert(stream_seed(master, state, setting)));
            }
        }
    }
}

#[test]
fn realized_projectors_match_targets() {
    for s in measurement_settings() {
        let (t5, t6) = solve_measurement_angles(&s).unwrap();
        let realized = detection_projectors(t5, t6);
        for (d, p) in s.detector_projectors.iter().enumerate() {
            let dev = (realized[d] - p.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-10, "{} D{}: {dev:e}", s.name, d + 1);
        }
    }
}

#[test]
fn literal_density_matrix_runs_without_optics() {
    let spec = StateSpec::Density {
        name: "mix".into(),
        density: [
            [
                Number::Real(0.5),
                Number::Real(0.0),
                Number::Complex([0.0, 0.25]),
            ],
            [Number::Real(0.0), Number::Real(0.2), Number::Real(0.0)],
            [
                Number::Complex([0.0, -0.25]),
                Number::Real(0.0),
                Number::Real(0.3),
            ],
        ],
    };
    let c = Campaign {
        mean_heralds: 5000.0,
        ..Campaign::with_states(vec![spec])
    };
    let b = run_campaign(&c).unwrap();
    let s = &b.states[0];
    assert!(s.preparation.is_none());
    assert!((s.exact_lhs2 - 25.0 / 3.0).abs() < 1e-12);
    let rho = DensityMatrix::new(Matrix3::from_fn(|r, c| {
        Complex64::new(s.density[r][c][0], s.density[r][c][1])
    }))
    .unwrap();
    assert!((rho.matrix()[(0, 2)] - Complex64::new(0.0, 0.25)).norm() < 1e-15);
}

#[test]
fn full_campaign_is_reproducible_and_violates() {
    let c = Campaign::default();
    let a = run_campaign(&c).unwrap();
    assert_eq!(a, run_campaign(&c).unwrap());
    for s in &a.states {
        assert!((s.exact_lhs2 - 25.0 / 3.0).abs() < 1e-12, "{}", s.name);
        assert!((s.exact_lhs3 - 4.0 / 3.0).abs() < 1e-12, "{}", s.name);
        // Within 5 sigma of the quantum prediction.
        assert!(
            ((s.report.lhs2.value - 25.0 / 3.0) / s.report.lhs2.sigma).abs() < 5.0,
            "{}",
            s.name
        );
        assert!(
            ((s.report.lhs3.value - 4.0 / 3.0) / s.report.lhs3.sigma).abs() < 5.0,
            "{}",
            s.name
        );
    }
}
