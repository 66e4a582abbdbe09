use dwlab::grid::Grid1D;
use dwlab::spectral::{
    agmon_distance, assemble_hamiltonian, eigenstate_lp_report, lowest_doublet, overlap_sup, splitting_scan,
    validate_potential, DiscreteHamiltonian, DoubletBasis, DoubletMethod, PotentialSpec,
};
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn quartic() -> PotentialSpec {
    PotentialSpec::quartic(2.0, 1.0).unwrap()
}

fn basis(hbar: f64, n: usize) -> DoubletBasis {
    let h = assemble_hamiltonian(Grid1D::new(3.0, n).unwrap(), &quartic(), hbar, 1.0).unwrap();
    lowest_doublet(&h, 1).unwrap()
}

fn check(name: &str) -> impl Fn(&dwlab::spectral::ValidationReport) -> bool + '_ {
    move |r| r.checks.iter().find(|c| c.name == name).map(|c| c.passed).unwrap()
}

#[test]
fn validation_examples() {
    let g = Grid1D::new(3.0, 1024).unwrap();
    assert!(validate_potential(&quartic(), &g).passed());

    let x = g.nodes();
    let single = PotentialSpec::tabulated(x.clone(), x.iter().map(|x| x * x).collect()).unwrap();
    let r = validate_potential(&single, &g);
    assert!(!check("two-minima")(&r));
    assert!(r.require().unwrap_err().to_string().contains("two-minima"));

    let tilted =
        PotentialSpec::tabulated(x.clone(), x.iter().map(|x| (x * x - 1.0).powi(2) + 0.1 * x).collect()).unwrap();
    assert!(!check("symmetry")(&validate_potential(&tilted, &g)));
}

fn oscillator(n: usize, dx: f64) -> DiscreteHamiltonian {
    let g = Grid1D::new(dx * n as f64 / 2.0, n).unwrap();
    let v = g.nodes().iter().map(|x| 0.5 * x * x).collect();
    DiscreteHamiltonian::from_samples(g, v, 1.0, 1.0).unwrap()
}

#[test]
fn oscillator_spectrum_and_richardson() {
    let coarse = lowest_doublet(&oscillator(1024, 0.02), 1).unwrap();
    let fine = lowest_doublet(&oscillator(2048, 0.01), 1).unwrap();
    assert!((fine.lambda1 - 0.5).abs() < 1e-4 && (fine.lambda2 - 1.5).abs() < 1e-4);
    for (c, f, exact) in [(coarse.lambda1, fine.lambda1, 0.5), (coarse.lambda2, fine.lambda2, 1.5)] {
        let ratio = (c - exact).abs() / (f - exact).abs();
        assert!((ratio - 4.0).abs() < 0.05, "error ratio {ratio}");
    }
}

#[test]
fn quartic_doublet_at_moderate_hbar() {
    let b = basis(0.3, 1024);
    assert!(b.lambda1 < b.lambda2 && b.omega > 0.0);
    assert!(b.gap3 > 2.0 * b.omega);
    let g = b.grid();
    for j in 1..g.len() {
        let m = g.mirror(j);
        assert!((b.phi1()[j] - b.phi1()[m]).abs() < 1e-8);
        assert!((b.phi2()[j] + b.phi2()[m]).abs() < 1e-8);
        assert!((b.phi_r()[j] - b.phi_l()[m]).abs() < 1e-8);
    }
}

/// Dense symmetric eigensolve of the interior block.
fn dense_eigenvalues(h: &DiscreteHamiltonian) -> Vec<f64> {
    let n = h.grid().len() - 1;
    let t = h.hopping();
    let v = h.potential();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            v[i + 1] + 2.0 * t
        } else if i.abs_diff(j) == 1 {
            -t
        } else {
            0.0
        }
    });
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn dense_oracle_agreement() {
    let h = assemble_hamiltonian(Grid1D::new(3.0, 256).unwrap(), &quartic(), 0.3, 1.0).unwrap();
    let b = lowest_doublet(&h, 2).unwrap();
    let e = dense_eigenvalues(&h);
    let omega = 0.5 * (e[1] - e[0]);
    assert!((b.omega - omega).abs() <= 1e-10 * omega, "{} vs {omega}", b.omega);
    assert!((b.lambda1 - e[0]).abs() <= 1e-10 * e[0]);
    assert!((b.lambda2 - e[1]).abs() <= 1e-10 * e[1]);
    for (k, lam) in b.higher.iter().enumerate() {
        assert!((lam - e[k + 2]).abs() <= 1e-10 * e[k + 2]);
    }
}

#[test]
fn eigen_residuals_and_invariants() {
    for hbar in [0.3, 0.1, 0.06] {
        let b = basis(hbar, 1024);
        assert!(b.residuals[0] <= 1e-8 * b.lambda1 && b.residuals[1] <= 1e-8 * b.lambda2);
        for (name, d, bound) in b.invariant_defects() {
            assert!(d <= bound, "hbar = {hbar}, {name}: {d:e} > {bound:e}");
        }
    }
    assert_eq!(basis(0.06, 1024).method, DoubletMethod::ParitySectors);
}

/// Adaptive Simpson on `[a, b]`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (simpson(f, a, m), simpson(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
            return l + r + (l + r - whole) / 15.0;
        }
        rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
    }
    rec(f, a, b, simpson(f, a, b), tol, 50)
}

#[test]
fn agmon_examples() {
    let (v0, b) = (1.5, 0.4);
    let edge = 1e-9;
    let x = vec![-2.0, -b - edge, -b, b, b + edge, 2.0];
    let square = PotentialSpec::tabulated(x, vec![0.0, 0.0, v0, v0, 0.0, 0.0]).unwrap();
    let g = agmon_distance(&square, 0.0).unwrap();
    assert!((g - 2.0 * b * v0.sqrt()).abs() < 1e-4 * g, "{g}");

    let spec = quartic();
    let oracle = adaptive_simpson(&|x| spec.eval(x).max(0.0).sqrt(), -1.0, 1.0, 1e-14);
    let g0 = agmon_distance(&spec, 0.0).unwrap();
    assert!((g0 - oracle).abs() < 1e-10, "{g0} vs {oracle}");

    let vals: Vec<f64> = [0.0, 0.2, 0.4].iter().map(|d| agmon_distance(&spec, *d).unwrap()).collect();
    assert!(vals[0] > vals[1] && vals[1] > vals[2]);
    assert!(agmon_distance(&spec, 2.0).is_err());
}

#[test]
fn overlap_sup_examples() {
    let hi = basis(0.1, 1024);
    let lo = basis(0.06, 1024);
    assert!(overlap_sup(&hi) >= 0.0);
    let r = (overlap_sup(&hi) / hi.omega) / (overlap_sup(&lo) / lo.omega);
    assert!((0.1..=10.0).contains(&r), "ratio of overlap_sup/omega: {r}");
    let swapped =
        hi.phi_l().iter().zip(hi.phi_r()).map(|(l, r)| (l * r).abs()).fold(0.0, f64::max);
    assert_eq!(swapped, overlap_sup(&hi));
}

#[test]
fn eigenstate_lp_examples() {
    let hbars = [0.1, 0.08, 0.06, 0.05, 0.04];
    let reports: Vec<_> = hbars.iter().map(|h| eigenstate_lp_report(&basis(*h, 1024), *h)).collect();
    for r in &reports {
        for s in ["phi1", "phi2"] {
            assert!((r.value(s, 2.0).unwrap() - 1.0).abs() < 1e-12);
        }
        for p in [4.0, f64::INFINITY] {
            let (a, b) = (r.value("phi1", p).unwrap(), r.value("phi2", p).unwrap());
            assert!((a - b).abs() <= 0.2 * a.max(b), "hbar = {}, p = {p}", r.hbar);
        }
    }
    let inf: Vec<f64> = reports.iter().map(|r| r.value("phi1", f64::INFINITY).unwrap()).collect();
    let (lo, hi) = inf.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    assert!(hi / lo <= 3.0);
}

#[test]
fn splitting_scan_examples() {
    let spec = quartic();
    let fit = splitting_scan(&spec, Grid1D::new(3.0, 1024).unwrap(), 1.0, &[0.10, 0.08, 0.06, 0.05, 0.04]).unwrap();
    assert!(fit.points.iter().all(|p| p.converged && p.omega > 0.0));
    assert!(fit.points.windows(2).all(|w| w[1].omega < w[0].omega));
    assert!(fit.monotone && fit.slope < 0.0 && fit.r_squared >= 0.999);
    let gamma = 2f64.sqrt() * agmon_distance(&spec, 0.0).unwrap();
    assert!((fit.slope.abs() - gamma).abs() <= 0.15 * gamma);
}

fn hamiltonian64() -> DiscreteHamiltonian {
    assemble_hamiltonian(Grid1D::new(3.0, 64).unwrap(), &quartic(), 0.3, 1.0).unwrap()
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

proptest! {
    #[test]
    fn hamiltonian_is_symmetric(f in prop::collection::vec(-1.0..1.0f64, 64), g in prop::collection::vec(-1.0..1.0f64, 64)) {
        let h = hamiltonian64();
        let (mut f, mut g) = (f, g);
        f[0] = 0.0;
        g[0] = 0.0;
        let hf = h.apply_real(&f);
        let hg = h.apply_real(&g);
        let a: f64 = hf.iter().zip(&g).map(|(x, y)| x * y).sum();
        let b: f64 = f.iter().zip(&hg).map(|(x, y)| x * y).sum();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0));
    }

    #[test]
    fn hamiltonian_commutes_with_reflection(re in prop::collection::vec(-1.0..1.0f64, 64), im in prop::collection::vec(-1.0..1.0f64, 64)) {
        let h = hamiltonian64();
        let g = *h.grid();
        let mut f: Vec<C> = re.iter().zip(&im).map(|(a, b)| C::new(*a, *b)).collect();
        f[0] = C::new(0.0, 0.0);
        let reflect = |v: &[C]| (0..v.len()).map(|j| v[g.mirror(j)]).collect::<Vec<C>>();
        let hrf = h.apply(&reflect(&f));
        let rhf = reflect(&h.apply(&f));
        let diff: Vec<C> = hrf.iter().zip(&rhf).map(|(a, b)| a - b).collect();
        let scale = dot(&f, &f).re.sqrt() * h.hopping();
        prop_assert!(dot(&diff, &diff).re.sqrt() <= 1e-10 * scale);
    }
}
