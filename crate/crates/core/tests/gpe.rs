use std::sync::Arc;

use dwlab::gpe::{
    energy, lp_diagnostics, project_doublet, propagate, remainder_consistency, remainder_terms, stability_experiment,
    EvolutionConfig, Method, StabilityConfig,
};
use dwlab::grid::{inner_product, Grid1D, Wavefunction};
use dwlab::spectral::{assemble_hamiltonian, lowest_doublet, overlap_sup, DoubletBasis, PotentialSpec};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn quartic() -> PotentialSpec {
    PotentialSpec::quartic(2.0, 1.0).unwrap()
}

fn basis(hbar: f64, n: usize) -> Arc<DoubletBasis> {
    let h = assemble_hamiltonian(Grid1D::new(3.0, n).unwrap(), &quartic(), hbar, 1.0).unwrap();
    Arc::new(lowest_doublet(&h, 1).unwrap())
}

fn l2_distance(a: &Wavefunction, b: &Wavefunction) -> f64 {
    let d: Vec<C> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    Wavefunction::new(*a.grid(), d).unwrap().norm()
}

#[test]
fn ground_state_is_stationary() {
    let b = basis(0.1, 1024);
    let traj = propagate(&b.phi1_wave(), &EvolutionConfig::new(b.clone(), 0.0)).unwrap();
    for psi in &traj.states {
        assert!((inner_product(&b.phi1_wave(), psi).unwrap().norm() - 1.0).abs() < 1e-8);
    }

    let b = basis(0.3, 512);
    let mut cfg = EvolutionConfig::new(b.clone(), 0.0);
    cfg.method = Method::CrankNicolson;
    cfg.stride = 1000;
    let traj = propagate(&b.phi1_wave(), &cfg).unwrap();
    for psi in &traj.states {
        assert!((inner_product(&b.phi1_wave(), psi).unwrap().norm() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn linear_beating_crank_nicolson() {
    let b = basis(0.3, 512);
    let mut cfg = EvolutionConfig::new(b.clone(), 0.0);
    cfg.method = Method::CrankNicolson;
    cfg.stride = 100;
    let traj = propagate(&b.phi_r_wave(), &cfg).unwrap();
    let err = traj.samples.iter().map(|s| (s.z - (2.0 * s.tau).cos()).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-6, "{err:e}");
}

#[test]
fn crank_nicolson_conservation_at_default_step() {
    let b = basis(0.3, 512);
    let mut cfg = EvolutionConfig::with_eta(b.clone(), 1.0);
    cfg.method = Method::CrankNicolson;
    cfg.stride = 200;
    let traj = propagate(&b.phi_r_wave(), &cfg).unwrap();
    assert!(traj.norm_drift() <= 1e-8);
    assert!(traj.energy_drift() <= 1e-6, "{:e}", traj.energy_drift());
    assert!(traj.max_completeness_defect() <= 1e-10);
}

#[test]
fn energy_examples() {
    let b = basis(0.3, 1024);
    let cfg = EvolutionConfig::new(b.clone(), 0.0);
    let e1 = energy(&b.phi1_wave(), &cfg).unwrap();
    assert!((e1 - b.lambda1).abs() <= 1e-6 * b.lambda1);
    let er = energy(&b.phi_r_wave(), &cfg).unwrap();
    assert!((er - b.big_omega).abs() <= 1e-6 * b.big_omega);

    let eps = 0.05;
    let with = energy(&b.phi_r_wave(), &EvolutionConfig::new(b.clone(), eps)).unwrap();
    let dx = b.grid().dx();
    let quartic: f64 = b.phi_r().iter().map(|p| p.powi(4)).sum::<f64>() * dx;
    assert!((with - er - 0.5 * eps * quartic).abs() <= 1e-14 * with);
}

#[test]
fn projection_examples() {
    let b = basis(0.3, 1024);
    let p = project_doublet(&b.phi_r_wave(), &b).unwrap();
    assert!((p.a_r - 1.0).norm() < 1e-10 && p.a_l.norm() < 1e-10 && p.psi_c_norm < 1e-10);
    let p = project_doublet(&b.phi2_wave(), &b).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((p.a_r - r).norm() < 1e-10 && (p.a_l + r).norm() < 1e-10);
}

#[test]
fn remainder_examples() {
    let b = basis(0.3, 1024);
    let a = C::from_polar(1.0, 0.7);
    let psi = b.phi_r_wave().scaled(a);
    let (r_r, r_l) = remainder_terms(&psi, &b).unwrap();
    assert!(r_r.norm() <= 1e-12, "{:e}", r_r.norm());
    // For psi = a phi_R the left remainder reduces to |a|^2 a integral phi_R^3 phi_L.
    let dx = b.grid().dx();
    let cross: f64 = b.phi_r().iter().zip(b.phi_l()).map(|(r, l)| r * r * r * l).sum::<f64>() * dx;
    assert!((r_l - a * cross).norm() <= 1e-14);
    assert!(r_l.norm() <= overlap_sup(&b) * (1.0 + 1e-12));
}

#[test]
fn remainders_along_a_trajectory() {
    let hbar = 0.08;
    let b = basis(hbar, 1024);
    let mut cfg = EvolutionConfig::with_eta(b.clone(), 1.0);
    cfg.dt = cfg.t_end / 4000.0;
    cfg.stride = 40;
    let traj = propagate(&b.phi_r_wave(), &cfg).unwrap();
    let scaled: Vec<f64> = traj
        .states
        .iter()
        .map(|psi| {
            let (r, l) = remainder_terms(psi, &b).unwrap();
            r.norm().max(l.norm()) * hbar.sqrt()
        })
        .collect();
    let max = scaled.iter().copied().fold(0.0, f64::max);
    assert!(max.is_finite() && max <= overlap_sup(&b).sqrt(), "{max:e}");
}

#[test]
fn remainder_consistency_holds() {
    let b = basis(0.3, 512);
    let mut cfg = EvolutionConfig::with_eta(b.clone(), 1.0);
    cfg.dt = cfg.t_end / 4000.0;
    cfg.stride = 4;
    let traj = propagate(&b.phi_r_wave(), &cfg).unwrap();
    let report = remainder_consistency(&traj, &cfg).unwrap();
    assert!(report.passed(), "{report:?}");
}

#[test]
fn lp_diagnostics_examples() {
    let mut linf = Vec::new();
    for hbar in [0.10, 0.08, 0.05] {
        let b = basis(hbar, 1024);
        let mut cfg = EvolutionConfig::with_eta(b.clone(), 1.0);
        cfg.t_end /= 4.0;
        cfg.dt = cfg.t_end / 1000.0;
        cfg.stride = 50;
        let traj = propagate(&b.phi_r_wave(), &cfg).unwrap();
        let report = lp_diagnostics(&traj, hbar);
        assert!(report.rows.iter().all(|r| (r.l2 - 1.0).abs() <= 1e-8));
        linf.extend(report.rows.iter().map(|r| r.linf));
    }
    let (lo, hi) = linf.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    assert!(hi / lo <= 3.0, "{}", hi / lo);

    let b = basis(0.1, 1024);
    let mut cfg = EvolutionConfig::new(b.clone(), 0.0);
    cfg.stride = 500;
    let traj = propagate(&b.phi1_wave(), &cfg).unwrap();
    let report = lp_diagnostics(&traj, 0.1);
    let g0 = report.rows[0].gradient;
    assert!(report.rows.iter().all(|r| (r.gradient - g0).abs() <= 1e-6 * g0));
}

#[test]
fn time_reversal_by_conjugation() {
    let b = basis(0.3, 512);
    for method in [Method::SplitStep, Method::CrankNicolson, Method::Spectral] {
        let mut cfg = EvolutionConfig::new(b.clone(), 0.0);
        cfg.method = method;
        cfg.t_end /= 8.0;
        cfg.dt = cfg.t_end / 2000.0;
        cfg.stride = 2000;
        let psi0 = b.phi_r_wave();
        let forward = propagate(&psi0, &cfg).unwrap();
        cfg.allow_general_initial = true;
        let back = propagate(&conj(forward.final_state()), &cfg).unwrap();
        let d = l2_distance(&conj(back.final_state()), &psi0);
        assert!(d <= 1e-8, "{method:?}: {d:e}");
    }
}

fn conj(psi: &Wavefunction) -> Wavefunction {
    Wavefunction::new(*psi.grid(), psi.values().iter().map(|v| v.conj()).collect()).unwrap()
}

#[test]
fn rotating_frame_is_a_global_phase() {
    let b = basis(0.3, 512);
    let mut cfg = EvolutionConfig::with_eta(b.clone(), 1.0);
    cfg.method = Method::SplitStep;
    cfg.t_end /= 8.0;
    cfg.dt = cfg.t_end / 4000.0;
    cfg.stride = 4000;
    let rot = propagate(&b.phi_r_wave(), &cfg).unwrap();
    cfg.rotating_frame = false;
    let lab = propagate(&b.phi_r_wave(), &cfg).unwrap();
    let phase = C::from_polar(1.0, -b.big_omega * cfg.t_end / b.hbar());
    let d = l2_distance(&rot.final_state().scaled(phase), lab.final_state());
    assert!(d <= 1e-8, "{d:e}");
}

#[test]
fn split_step_and_crank_nicolson_agree() {
    let b = basis(0.3, 512);
    let run = |method: Method, div: f64| {
        let mut cfg = EvolutionConfig::with_eta(b.clone(), 1.0);
        cfg.method = method;
        cfg.t_end /= 200.0;
        cfg.dt = cfg.t_end / div;
        cfg.stride = div as usize;
        propagate(&b.phi_r_wave(), &cfg).unwrap().final_state().clone()
    };
    let coarse = l2_distance(&run(Method::SplitStep, 10000.0), &run(Method::CrankNicolson, 10000.0));
    let fine = l2_distance(&run(Method::SplitStep, 20000.0), &run(Method::CrankNicolson, 20000.0));
    assert!(fine <= 1e-5, "{fine:e}");
    // Both schemes are second order.
    assert!(fine < coarse / 3.0, "{fine:e} vs {coarse:e}");
}

#[test]
fn initial_state_checks() {
    let b = basis(0.3, 256);
    let cfg = EvolutionConfig::new(b.clone(), 0.0);
    assert!(propagate(&b.phi_r_wave().scaled(C::new(1.1, 0.0)), &cfg).is_err());
    let g = *b.grid();
    let off = Wavefunction::from_fn(g, |x| C::new((-(x * x) * 4.0).exp(), 0.0)).unwrap().normalized().unwrap();
    let err = propagate(&off, &cfg).unwrap_err();
    assert!(matches!(err, dwlab::Error::Config(_)), "{err}");
    let capped = EvolutionConfig::with_eta(b.clone(), 1e3);
    assert!(propagate(&b.phi_r_wave(), &capped).is_err());
}

#[test]
fn linear_stability_scan_has_no_deviation() {
    let mut cfg = StabilityConfig::new(quartic(), 3.0, 512, vec![0.3, 0.2, 0.15], 0.0);
    cfg.tau_prime = 2.0;
    cfg.continuum_modes = 16;
    let r = stability_experiment(&cfg).unwrap();
    for row in &r.rows {
        assert!(row.max_dev_r <= 1e-6 && row.max_dev_l <= 1e-6 && row.max_psi_c <= 1e-6, "{row:?}");
    }
}

fn random_field() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 256)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn projection_is_complete_and_orthogonal(v in random_field()) {
        let b = basis(0.3, 256);
        let mut vals: Vec<C> = v.iter().map(|(a, c)| C::new(*a, *c)).collect();
        vals[0] = C::new(0.0, 0.0);
        let psi = Wavefunction::new(*b.grid(), vals).unwrap().normalized().unwrap();
        let p = project_doublet(&psi, &b).unwrap();
        prop_assert!((p.a_r.norm_sqr() + p.a_l.norm_sqr() + p.psi_c_norm.powi(2) - 1.0).abs() <= 1e-10);
        prop_assert!(p.completeness_defect <= 1e-10 && p.orthogonality_defect <= 1e-10);
    }
}
