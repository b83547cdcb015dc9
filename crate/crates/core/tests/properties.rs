mod common;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use tangle_core::entanglement::{
    extract_canonical_coefficients, invariants_from_canonical, invariants_from_state,
};
use tangle_core::noise::{error_event_probabilities, estimate_tangle, post_select};
use tangle_core::state::Qubit;
use tangle_core::{
    apply_local_unitaries, build_unitary, hyperdeterminant, minimize, reduced_density_matrix,
    tangle, CanonicalCoefficients, Complex, LocalUnitaryParams, NoiseConfig, OptimizerOptions,
    PureState3, ShotHistogram, SingleQubitUnitary, Subsystem,
};

fn state() -> impl Strategy<Value = PureState3> {
    prop::array::uniform16(-0.5f64..0.5)
        .prop_filter("non-degenerate", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
        .prop_map(|v| {
            let mut amps = [Complex::new(0.0, 0.0); 8];
            for (i, a) in amps.iter_mut().enumerate() {
                *a = Complex::new(v[2 * i], v[2 * i + 1]);
            }
            PureState3::from_unnormalized(amps).unwrap()
        })
}

fn params() -> impl Strategy<Value = LocalUnitaryParams> {
    prop::array::uniform9(-10.0f64..10.0).prop_map(|x| LocalUnitaryParams::from_slice(&x).unwrap())
}

fn angles() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-10.0f64..10.0)
}

fn canonical() -> impl Strategy<Value = CanonicalCoefficients> {
    (prop::array::uniform5(0.0f64..1.0), 0.0..=PI)
        .prop_filter("non-zero", |(l, _)| l.iter().sum::<f64>() > 1e-3)
        .prop_map(|(l, phi)| {
            let n = l.iter().map(|x| x * x).sum::<f64>().sqrt();
            CanonicalCoefficients::new(l.map(|x| x / n), phi).unwrap()
        })
}

proptest! {
    #[test]
    fn local_unitaries_preserve_norm(s in state(), p in params()) {
        let out = apply_local_unitaries(&s, &p);
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn local_unitaries_preserve_invariants(s in state(), p in params()) {
        let before = invariants_from_state(&s);
        let after = invariants_from_state(&apply_local_unitaries(&s, &p));
        prop_assert!(before.max_abs_diff(&after) < 1e-9, "{before:?} vs {after:?}");
        prop_assert!((tangle(&s) - tangle(&apply_local_unitaries(&s, &p))).abs() < 1e-9);
    }

    #[test]
    fn theta0_has_period_four_pi(t in angles()) {
        let a = build_unitary(t).unwrap();
        let b = build_unitary([t[0] + 4.0 * PI, t[1], t[2]]).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
        prop_assert!(a.is_unitary(1e-12));
    }

    #[test]
    fn marginal_purity_matches_lagrange_identity(s in state()) {
        let rho = reduced_density_matrix(&s, Subsystem::A);
        prop_assert!((rho.purity() - common::purity_a_lagrange(&s)).abs() < 1e-10);
    }

    #[test]
    fn complementary_marginals_share_purity(s in state()) {
        let ab = reduced_density_matrix(&s, Subsystem::AB);
        let c = reduced_density_matrix(&s, Subsystem::C);
        prop_assert!((ab.trace().re - 1.0).abs() < 1e-12);
        prop_assert!((ab.purity() - c.purity()).abs() < 1e-10);
        prop_assert!(ab.is_hermitian(1e-12));
        let bc = reduced_density_matrix(&s, Subsystem::BC);
        let a = reduced_density_matrix(&s, Subsystem::A);
        prop_assert!((bc.purity() - a.purity()).abs() < 1e-10);
    }

    #[test]
    fn marginals_are_positive(s in state(), v in prop::array::uniform8(-1.0f64..1.0)) {
        let rho = reduced_density_matrix(&s, Subsystem::AB);
        let probe: Vec<Complex> = (0..4).map(|i| Complex::new(v[2 * i], v[2 * i + 1])).collect();
        prop_assert!(rho.expectation(&probe).re >= -1e-10);
    }

    #[test]
    fn tangle_is_four_root_i5(s in state()) {
        let inv = invariants_from_state(&s);
        prop_assert!((tangle(&s) - 4.0 * inv.i5.sqrt()).abs() < 1e-9);
        prop_assert!(inv.in_range(1e-9), "{inv:?}");
        prop_assert!(tangle(&s) <= 1.0 + 1e-9);
    }

    #[test]
    fn hyperdeterminant_matches_table(s in state()) {
        prop_assert!((hyperdeterminant(&s) - common::hdet_table(&s)).norm() < 1e-12);
    }

    #[test]
    fn closed_form_invariants_match_operator_path(c in canonical()) {
        let closed = invariants_from_canonical(&c);
        let direct = invariants_from_state(&c.to_state());
        prop_assert!(closed.max_abs_diff(&direct) < 1e-12, "{closed:?} vs {direct:?}");
        prop_assert!((c.tangle() - tangle(&c.to_state())).abs() < 1e-12);
    }

    #[test]
    fn extraction_survives_phase_dressing(
        c in canonical(),
        phases in prop::array::uniform4(-TAU..TAU),
    ) {
        let dressed = c
            .to_state()
            .apply_gate(Qubit::A, &SingleQubitUnitary::phase(phases[0]))
            .apply_gate(Qubit::B, &SingleQubitUnitary::phase(phases[1]))
            .apply_gate(Qubit::C, &SingleQubitUnitary::phase(phases[2]));
        let amps = dressed.amplitudes().map(|a| a * Complex::from_polar(1.0, phases[3]));
        let dressed = PureState3::new(amps).unwrap();
        let back = extract_canonical_coefficients(&dressed).unwrap();
        for (a, b) in back.lambda().iter().zip(c.lambda()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        if back.phase_identifiable() {
            prop_assert!((back.delta() - c.delta()).abs() < 1e-9);
        }
        let lhs = invariants_from_canonical(&back);
        prop_assert!(lhs.max_abs_diff(&invariants_from_state(&dressed)) < 1e-9);
    }

    #[test]
    fn post_select_only_removes_forbidden(counts in prop::array::uniform8(0u64..10_000)) {
        let h = ShotHistogram::from_counts(counts);
        let p = post_select(&h);
        for (i, (a, b)) in counts.iter().zip(p.counts()).enumerate() {
            prop_assert!(b <= a);
            if ![1, 2, 3].contains(&i) {
                prop_assert_eq!(a, b);
            }
        }
        prop_assert_eq!(p.counts().iter().sum::<u64>(), p.shots_kept());
        prop_assert!(p.shots_kept() <= p.shots_total());
    }

    #[test]
    fn estimate_is_a_probability_product(counts in prop::array::uniform8(0u64..10_000)) {
        let h = ShotHistogram::from_counts(counts);
        if let Ok(e) = estimate_tangle(&h) {
            prop_assert!((0.0..=1.0).contains(&e.tau_hat));
            prop_assert!(e.sigma_tau >= 0.0);
        }
    }

    #[test]
    fn powell_is_translation_equivariant(
        shift in prop::array::uniform3(-3.0f64..3.0),
        start in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let centre = [0.5, -1.0, 2.0];
        let f = |x: &[f64]| {
            let d: Vec<f64> = x.iter().zip(centre).map(|(a, c)| a - c).collect();
            d[0] * d[0] + 3.0 * d[1] * d[1] + 0.5 * d[2] * d[2] + d[0] * d[1]
        };
        let g = |x: &[f64]| {
            let y: Vec<f64> = x.iter().zip(shift).map(|(a, c)| a - c).collect();
            f(&y)
        };
        let opts = OptimizerOptions::default();
        let x0: Vec<f64> = start.iter().zip(shift).map(|(a, c)| a + c).collect();
        let r = minimize(g, &x0, &opts).unwrap();
        for i in 0..3 {
            prop_assert!((r.best_params[i] - (centre[i] + shift[i])).abs() < 1e-6, "{r:?}");
        }
        prop_assert!(r.best_value <= g(&x0) + 1e-15);
    }
}

#[test]
fn error_events_sum_to_one_and_grow_with_t() {
    let mut last_p1 = -1.0;
    for t in 0..=5 {
        let noise = NoiseConfig::from_level(t).unwrap();
        let e = error_event_probabilities(&noise);
        assert!((e.p0 + e.p1 + e.p2 + e.p3plus - 1.0).abs() < 1e-12);
        assert!(e.p1 > last_p1);
        last_p1 = e.p1;
        // enumeration over all slot patterns
        let dist = common::error_count_distribution(&noise.slot_probabilities());
        assert!((e.p0 - dist[0]).abs() < 1e-14);
        assert!((e.p1 - dist[1]).abs() < 1e-14);
        assert!((e.p2 - dist[2]).abs() < 1e-14);
        assert!((e.p3plus - dist[3..].iter().sum::<f64>()).abs() < 1e-14);
    }
}

#[test]
fn powell_is_deterministic() {
    let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[0] * x[1]).sin().powi(2) + 0.1 * x[1] * x[1];
    let opts = OptimizerOptions::default();
    let a = minimize(f, &[2.0, 2.0], &opts).unwrap();
    let b = minimize(f, &[2.0, 2.0], &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
}

#[test]
fn powell_accepted_values_never_increase() {
    // the reported point lies between the start value and the best value seen
    use std::cell::RefCell;
    let log = RefCell::new(Vec::new());
    let f = |x: &[f64]| {
        let v = (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        log.borrow_mut().push(v);
        v
    };
    for budget in [5, 20, 50, 100, 200, 400] {
        log.borrow_mut().clear();
        let opts = OptimizerOptions { max_evaluations: budget, ..Default::default() };
        let r = minimize(&f, &[-1.2, 1.0], &opts).unwrap();
        let first = log.borrow()[0];
        let min_seen = log.borrow().iter().copied().fold(f64::INFINITY, f64::min);
        assert!(r.best_value <= first);
        assert!(r.best_value >= min_seen);
    }
    let mut prev = f64::INFINITY;
    for iters in 1..=30 {
        let opts = OptimizerOptions { max_iterations: iters, ..Default::default() };
        let r = minimize(&f, &[-1.2, 1.0], &opts).unwrap();
        assert!(r.best_value <= prev, "iteration {iters}: {} > {prev}", r.best_value);
        prev = r.best_value;
    }
}
