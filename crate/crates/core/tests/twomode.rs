use dwlab::elliptic::complete_k;
use dwlab::twomode::{
    classify_motion, critical_eta, imbalance_analytic, integrate_two_mode, max_step, modulus_squared,
    two_mode_params, Regime, TwoModeState,
};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn right_well() -> TwoModeState {
    TwoModeState::from_imbalance(1.0, 0.0).unwrap()
}

fn z_path(state: &TwoModeState, eta: f64, tau_end: f64) -> Vec<(f64, f64)> {
    let dtau = 1e-3f64.min(max_step(eta));
    integrate_two_mode(state, eta, tau_end, dtau).unwrap().into_iter().map(|(t, s)| (t, s.imbalance())).collect()
}

fn k2_from_display(i: f64, eta: f64) -> f64 {
    0.5 * (1.0 - (1.0 + 0.5 * i * eta) / (0.25 * eta * eta + 1.0 + i * eta).sqrt())
}

#[test]
fn params_right_well_eta_three() {
    let p = two_mode_params(&right_well(), 3.0).unwrap();
    assert!((p.i + 0.75).abs() < 1e-14);
    assert!((p.k2 - 9.0 / 16.0).abs() < 1e-14);
    assert!((p.a - 1.0).abs() < 1e-14);
}

#[test]
fn params_linear_limit() {
    let p = two_mode_params(&right_well(), 0.0).unwrap();
    assert_eq!(p.k2, 0.0);
    assert!((p.a - 1.0).abs() < 1e-15);
    for tau in [0.0, 0.3, 1.7, 5.0] {
        assert!((imbalance_analytic(tau, &p).unwrap() - (2.0 * tau).cos()).abs() < 1e-14);
    }
}

#[test]
fn params_symmetric_stationary_state() {
    let s = TwoModeState::from_imbalance(0.0, 0.0).unwrap();
    let p = two_mode_params(&s, 1.0).unwrap();
    assert!((p.i - 1.0).abs() < 1e-15);
    assert!(p.k2.abs() < 1e-15 && p.a.abs() < 1e-7);
    assert!(z_path(&s, 1.0, 20.0).iter().all(|(_, z)| z.abs() < 1e-12));
}

#[test]
fn params_reproduce_displayed_formulas() {
    for (z0, th, eta) in [(0.3, 0.4, 1.5), (-0.7, 2.0, 6.0), (0.9, -1.0, 2.5), (0.5, 3.0, 0.7)] {
        let s = TwoModeState::from_imbalance(z0, th).unwrap();
        let p = two_mode_params(&s, eta).unwrap();
        let i = (1.0f64 - z0 * z0).sqrt() * th.cos() - eta * z0 * z0 / 4.0;
        assert!((p.i - i).abs() < 1e-14);
        assert!((p.k2 - k2_from_display(i, eta)).abs() < 1e-14);
        if p.k2 < 1.0 {
            assert!(p.a >= z0.abs() * (1.0 - 1e-12) && p.a <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn analytic_examples() {
    let p = two_mode_params(&TwoModeState::from_imbalance(0.4, 0.7).unwrap(), 2.0).unwrap();
    assert!((imbalance_analytic(p.tau0, &p).unwrap() - p.a).abs() < 1e-14);

    let lin = two_mode_params(&right_well(), 0.0).unwrap();
    let quarter = std::f64::consts::FRAC_PI_4;
    for (tau, z) in [(0.0, 1.0), (quarter, 0.0), (2.0 * quarter, -1.0)] {
        assert!((imbalance_analytic(tau, &lin).unwrap() - z).abs() < 1e-15);
    }

    let p = two_mode_params(&right_well(), 4.2).unwrap();
    assert!((p.k2 - 1.1025).abs() < 1e-12);
    let floor = p.a * (1.0 - 1.0 / p.k2).sqrt();
    let min = (0..=500_000).map(|j| imbalance_analytic(j as f64 * 1e-4, &p).unwrap()).fold(f64::INFINITY, f64::min);
    assert!(floor > 0.0 && min >= floor - 1e-12, "{min} < {floor}");
    assert!((min - floor).abs() < 1e-6);
}

#[test]
fn separatrix_is_refused() {
    let p = two_mode_params(&right_well(), 4.0).unwrap();
    assert_eq!(p.regime, Regime::Separatrix);
    assert!(imbalance_analytic(1.0, &p).is_err());
}

#[test]
fn integrator_examples() {
    let traj = integrate_two_mode(&TwoModeState::new(C::new(1.0, 0.0), C::new(0.0, 0.0)), 0.0, 10.0, 1e-3).unwrap();
    let err = traj
        .iter()
        .map(|(t, s)| (s.b_r - C::new(t.cos(), 0.0)).norm().max((s.b_l - C::new(0.0, t.sin())).norm()))
        .fold(0.0, f64::max);
    assert!(err <= 1e-10, "{err:e}");

    let traj = integrate_two_mode(&right_well(), 3.0, 20.0, 1e-3).unwrap();
    assert!(traj.iter().all(|(_, s)| (s.norm_sqr() - 1.0).abs() <= 1e-10));

    let p = two_mode_params(&right_well(), 2.0).unwrap();
    let d = z_path(&right_well(), 2.0, 20.0)
        .iter()
        .map(|(t, z)| (z - imbalance_analytic(*t, &p).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(d <= 1e-8, "{d:e}");

    assert!(integrate_two_mode(&right_well(), 5.0, 1.0, 1e-2).is_err());
}

#[test]
fn classification_examples() {
    assert_eq!(classify_motion(&two_mode_params(&right_well(), 0.0).unwrap()).regime, Regime::Beating);
    let below = classify_motion(&two_mode_params(&right_well(), 3.8).unwrap());
    assert_eq!(below.regime, Regime::Beating);
    assert!((below.k2 - 0.9025).abs() < 1e-12);
    let above = classify_motion(&two_mode_params(&right_well(), 4.2).unwrap());
    assert_eq!(above.regime, Regime::SelfTrapped);
    assert!((above.k2 - 1.1025).abs() < 1e-12);
}

#[test]
fn critical_eta_examples() {
    assert!((critical_eta(1.0, 0.0).unwrap() - 4.0).abs() < 1e-9);
    for th in [0.5, 2.0, -3.0] {
        assert!((critical_eta(1.0, th).unwrap() - 4.0).abs() < 1e-9);
    }
    // Oracle: first node of a 1e-4 grid with k^2 >= 1, from the displayed modulus.
    let (z0, th) = (0.6f64, 0.0f64);
    let k2 = |eta: f64| {
        let i = (1.0f64 - z0 * z0).sqrt() * th.cos() - eta * z0 * z0 / 4.0;
        k2_from_display(i, eta)
    };
    let first = (1..=10_000_000).map(|j| j as f64 * 1e-4).find(|e| k2(*e) >= 1.0).unwrap();
    let c = critical_eta(z0, th).unwrap();
    assert!((c - first).abs() <= 1e-4 + 1e-12, "{c} vs grid {first}");
    assert!((modulus_squared(z0, th, c) - 1.0).abs() < 1e-9);
}

fn away_from_separatrix() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.0..=1.0f64, -3.1..3.1f64, -10.0..10.0f64).prop_filter("near k^2 = 1", |(z, t, e)| {
        (modulus_squared(*z, *t, *e) - 1.0).abs() > 1e-3
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn ode_matches_closed_form((z0, th, eta) in away_from_separatrix()) {
        let s = TwoModeState::from_imbalance(z0, th).unwrap();
        let p = two_mode_params(&s, eta).unwrap();
        let d = z_path(&s, eta, 20.0)
            .iter()
            .map(|(t, z)| (z - imbalance_analytic(*t, &p).unwrap()).abs())
            .fold(0.0, f64::max);
        prop_assert!(d <= 1e-6, "discrepancy {:e}", d);
    }

    #[test]
    fn norm_drift_per_ten_thousand_steps(z0 in -1.0..=1.0f64, th in -3.1..3.1f64, eta in -8.0..8.0f64) {
        let s = TwoModeState::from_imbalance(z0, th).unwrap();
        let dtau = 1e-3f64.min(max_step(eta));
        let traj = integrate_two_mode(&s, eta, 10_000.0 * dtau, dtau).unwrap();
        let drift = traj.iter().map(|(_, s)| (s.norm_sqr() - 1.0).abs()).fold(0.0, f64::max);
        prop_assert!(drift <= 1e-9, "{:e}", drift);
    }

    #[test]
    fn sign_dichotomy((z0, th, eta) in away_from_separatrix()) {
        prop_assume!(eta.abs() > 1e-3);
        let s = TwoModeState::from_imbalance(z0, th).unwrap();
        let p = two_mode_params(&s, eta).unwrap();
        prop_assume!(p.a > 1e-3);
        if p.k2 < 1.0 {
            let k = p.k2.sqrt();
            let period = 4.0 * complete_k(k).unwrap() * 2.0 * k / (p.a * eta.abs());
            let zs = z_path(&s, eta, period * 1.001);
            prop_assert!(zs.iter().any(|(_, z)| *z > 0.0) && zs.iter().any(|(_, z)| *z < 0.0));
        } else {
            let period = 2.0 * complete_k(1.0 / p.k2.sqrt()).unwrap() * 2.0 / (p.a * eta.abs());
            let zs = z_path(&s, eta, 10.0 * period);
            let lo = zs.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
            let hi = zs.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo * hi > 0.0);
        }
    }

    #[test]
    fn gauge_invariance_of_imbalance(z0 in -1.0..=1.0f64, th in -3.1..3.1f64, eta in -6.0..6.0f64, phase in -3.1..3.1f64) {
        let s = TwoModeState::from_imbalance(z0, th).unwrap();
        let u = C::from_polar(1.0, phase);
        let rotated = TwoModeState::new(s.b_r * u, s.b_l * u);
        let a = z_path(&s, eta, 5.0);
        let b = z_path(&rotated, eta, 5.0);
        let d = a.iter().zip(&b).map(|(x, y)| (x.1 - y.1).abs()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-12, "{:e}", d);
    }
}

/// `max_tau |z_eta - z_0| / eta` on `[0, 10]` for `eta = 1e-2, 1e-3`.
fn continuity_constants(z0: f64, th: f64) -> [f64; 2] {
    let s = TwoModeState::from_imbalance(z0, th).unwrap();
    let base = z_path(&s, 0.0, 10.0);
    [1e-2, 1e-3].map(|eta| {
        let d = z_path(&s, eta, 10.0).iter().zip(&base).map(|(a, b)| (a.1 - b.1).abs()).fold(0.0, f64::max);
        d / eta
    })
}

#[test]
fn small_eta_continuity() {
    for (z0, th) in [(0.3, 0.8), (-0.6, 2.0), (0.5, -1.2), (0.9, 0.0)] {
        let c = continuity_constants(z0, th);
        let r = c[0] / c[1];
        assert!((0.5..=2.0).contains(&r), "z0 = {z0}: C = {c:?}");
    }
    // From a single well z is even in eta, so the linear constant shrinks with eta.
    let c = continuity_constants(1.0, 0.0);
    assert!(c[1] <= 2.0 * c[0], "{c:?}");
}
