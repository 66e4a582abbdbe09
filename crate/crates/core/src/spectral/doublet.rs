//! Ground doublet of the discrete Hamiltonian.
//!
//! The interior block commutes with the reflection about the center node, so
//! it splits into an even sector (nodes `c..n`, symmetrized by scaling the
//! center component by `1/sqrt 2`) and an odd sector (nodes `c+1..n`, zero at
//! the center). The lowest vector of each sector gives `phi_1` and `phi_2`.
//!
//! When the splitting is large compared with the bisection tolerance, both
//! eigenvalues come from bisection on the full interior block. Otherwise the
//! sectors are solved in double-double arithmetic and the splitting is taken
//! from the discrete Wronskian identity
//!
//! ```text
//! omega = t e_c o_{c+1} / (2 sum_{j > c} e_j o_j)
//! ```
//!
//! (`t` the hopping amplitude), which involves no difference of nearly equal
//! eigenvalues.

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::hamiltonian::DiscreteHamiltonian;
use super::tridiag::{Scalar, SymTridiag};
use crate::error::{Error, Result};
use crate::grid::{dot_real, lp_norm, Grid1D, Wavefunction};

/// Splittings below this multiple of the bisection tolerance use the sector path.
pub const SECTOR_THRESHOLD: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DoubletMethod {
    FullDomain,
    ParitySectors,
}

#[derive(Debug, Clone)]
pub struct DoubletBasis {
    grid: Grid1D,
    hbar: f64,
    mass: f64,
    potential: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub omega: f64,
    pub big_omega: f64,
    /// `lambda_3 - lambda_2`.
    pub gap3: f64,
    /// `lambda_3, lambda_4, ...` as requested.
    pub higher: Vec<f64>,
    /// `integral phi_R^4`, the coefficient of `|a_R|^2 a_R` in the projected equation.
    pub c: f64,
    /// `||phi_R^2||_2 = sqrt(c)`, the alternative normalization.
    pub c_norm: f64,
    pub method: DoubletMethod,
    /// `||H phi_i - lambda_i phi_i||` for `i = 1, 2`.
    pub residuals: [f64; 2],
    /// `max(|phi_1|, |phi_2|)` on the two nodes adjacent to the domain edge.
    pub truncation_defect: f64,
    /// `integral_{x < 0} phi_R^2`, the mass of `phi_R` outside the right half-line.
    pub leakage: f64,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
    phi_r: Vec<f64>,
    phi_l: Vec<f64>,
}

impl DoubletBasis {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// The Hamiltonian this basis was computed from.
    pub fn hamiltonian(&self) -> DiscreteHamiltonian {
        DiscreteHamiltonian::from_samples(self.grid, self.potential.clone(), self.hbar, self.mass)
            .expect("basis holds a valid Hamiltonian")
    }

    pub fn phi1(&self) -> &[f64] {
        &self.phi1
    }

    pub fn phi2(&self) -> &[f64] {
        &self.phi2
    }

    pub fn phi_r(&self) -> &[f64] {
        &self.phi_r
    }

    pub fn phi_l(&self) -> &[f64] {
        &self.phi_l
    }

    fn wave(&self, v: &[f64]) -> Wavefunction {
        Wavefunction::from_real(self.grid, v).expect("basis vectors are finite")
    }

    pub fn phi1_wave(&self) -> Wavefunction {
        self.wave(&self.phi1)
    }

    pub fn phi2_wave(&self) -> Wavefunction {
        self.wave(&self.phi2)
    }

    pub fn phi_r_wave(&self) -> Wavefunction {
        self.wave(&self.phi_r)
    }

    pub fn phi_l_wave(&self) -> Wavefunction {
        self.wave(&self.phi_l)
    }

    /// Beating period `pi hbar / omega`.
    pub fn beating_period(&self) -> f64 {
        std::f64::consts::PI * self.hbar / self.omega
    }

    /// Named invariant defects, each paired with its bound.
    pub fn invariant_defects(&self) -> Vec<(&'static str, f64, f64)> {
        let dx = self.grid.dx();
        let n = self.grid.len();
        let norm = |v: &[f64]| dot_real(v, v, dx).sqrt();
        let parity = |v: &[f64], s: f64| {
            let d: Vec<f64> = (0..n).map(|j| v[j] - s * v[self.grid.mirror(j)]).collect();
            norm(&d)
        };
        let reflect_rl: Vec<f64> =
            (0..n).map(|j| self.phi_r[self.grid.mirror(j)] - self.phi_l[j]).collect();
        vec![
            ("norm phi1", (norm(&self.phi1) - 1.0).abs(), 1e-10),
            ("norm phi2", (norm(&self.phi2) - 1.0).abs(), 1e-10),
            ("norm phiR", (norm(&self.phi_r) - 1.0).abs(), 1e-10),
            ("norm phiL", (norm(&self.phi_l) - 1.0).abs(), 1e-10),
            ("phi1 even", parity(&self.phi1, 1.0), 1e-8),
            ("phi2 odd", parity(&self.phi2, -1.0), 1e-8),
            ("<phiR, phiL>", dot_real(&self.phi_r, &self.phi_l, dx).abs(), 1e-10),
            ("R phiR - phiL", norm(&reflect_rl), 1e-8),
        ]
    }
}

/// Even and odd sector matrices in precision `F`, plus the hopping amplitude.
pub(crate) struct Sectors<F> {
    pub even: SymTridiag<F>,
    pub odd: SymTridiag<F>,
    pub hop: F,
}

pub(crate) fn sectors<F: Scalar>(h: &DiscreteHamiltonian, conv: impl Fn(f64) -> F) -> Sectors<F> {
    let n = h.grid().len();
    let c = h.grid().center();
    let t = h.hopping();
    let v = h.potential();
    let hop = conv(t);
    let diag = |j: usize| conv(2.0 * t + v[j]);
    let two = conv(2.0);
    let even_diag: Vec<F> = (c..n).map(diag).collect();
    let mut even_off = vec![-hop; even_diag.len() - 1];
    even_off[0] = -(two.sqrt() * hop);
    let odd_diag: Vec<F> = (c + 1..n).map(diag).collect();
    let odd_off = vec![-hop; odd_diag.len() - 1];
    Sectors {
        even: SymTridiag { diag: even_diag, off: even_off },
        odd: SymTridiag { diag: odd_diag, off: odd_off },
        hop,
    }
}

/// Unit sector vector to an `L^2(dx)`-normalized even field on the full grid.
pub(crate) fn even_to_full<F: Scalar>(v: &[F], grid: &Grid1D) -> Vec<F> {
    let n = grid.len();
    let c = grid.center();
    let s = F::one().quot(F::from(2.0 * grid.dx()).unwrap().sqrt());
    let mut out = vec![F::zero(); n];
    out[c] = F::from(2.0).unwrap().sqrt() * v[0] * s;
    for i in 1..c {
        out[c + i] = v[i] * s;
        out[c - i] = v[i] * s;
    }
    out
}

/// Unit odd-sector vector to an `L^2(dx)`-normalized odd field on the full grid.
pub(crate) fn odd_to_full<F: Scalar>(v: &[F], grid: &Grid1D) -> Vec<F> {
    let n = grid.len();
    let c = grid.center();
    let s = F::one().quot(F::from(2.0 * grid.dx()).unwrap().sqrt());
    let mut out = vec![F::zero(); n];
    for i in 1..c {
        out[c + i] = v[i - 1] * s;
        out[c - i] = -(v[i - 1] * s);
    }
    out
}

/// Bisection tolerance scale `4 eps ||T||`.
fn bisection_tol(t: &SymTridiag<f64>) -> f64 {
    4.0 * f64::EPSILON * t.norm_inf()
}

/// Lowest eigenpair of a sector with a shift just below the eigenvalue.
fn lowest_pair<F: Scalar>(t: &SymTridiag<F>) -> Result<(F, Vec<F>)> {
    let lambda = t.eigenvalue(0)?;
    let delta = F::from(64.0).unwrap() * F::roundoff() * t.norm_inf().max(F::one());
    let mut v = t.inverse_iteration(lambda - delta, 4);
    let sum = v.iter().fold(F::zero(), |s, &x| s + x);
    if sum < F::zero() {
        for x in &mut v {
            *x = -*x;
        }
    }
    Ok((lambda, v))
}

fn residual(h: &DiscreteHamiltonian, phi: &[f64], lambda: f64) -> f64 {
    let hphi = h.apply_real(phi);
    let r: Vec<f64> = hphi.iter().zip(phi).map(|(a, b)| a - lambda * b).collect();
    dot_real(&r, &r, h.grid().dx()).sqrt()
}

/// Ground doublet and `k_extra` further eigenvalues of `h`.
///
/// For Hamiltonians assembled from a validated double-well potential the
/// model checks (gap `lambda_3 - lambda_2 > 2 omega`, localization of `phi_R`,
/// decay at the domain edge) are enforced; for [`DiscreteHamiltonian::from_samples`]
/// only the solver checks apply.
pub fn lowest_doublet(h: &DiscreteHamiltonian, k_extra: usize) -> Result<DoubletBasis> {
    if k_extra < 1 {
        return Err(Error::Usage("k_extra must be at least 1".into()));
    }
    let grid = *h.grid();
    let n = grid.len();
    let full = h.tridiagonal();
    let tol = bisection_tol(&full);
    let sec = sectors(h, |x| x);
    let (le, _) = lowest_pair(&sec.even)?;
    let (lo, _) = lowest_pair(&sec.odd)?;
    let omega_est = 0.5 * (lo - le);

    let mut higher = Vec::with_capacity(k_extra);
    let (lambda1, lambda2, omega, phi1, phi2, phi_r, phi_l, method);
    if omega_est >= SECTOR_THRESHOLD * tol {
        method = DoubletMethod::FullDomain;
        lambda1 = full.eigenvalue(0)?;
        lambda2 = full.eigenvalue(1)?;
        for k in 0..k_extra {
            higher.push(full.eigenvalue(2 + k)?);
        }
        omega = 0.5 * (lambda2 - lambda1);
        let (_, ve) = lowest_pair(&sec.even)?;
        let (_, vo) = lowest_pair(&sec.odd)?;
        phi1 = even_to_full(&ve, &grid);
        phi2 = odd_to_full(&vo, &grid);
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        phi_r = phi1.iter().zip(&phi2).map(|(a, b)| r2 * (a + b)).collect::<Vec<_>>();
        phi_l = phi1.iter().zip(&phi2).map(|(a, b)| r2 * (a - b)).collect::<Vec<_>>();
    } else {
        method = DoubletMethod::ParitySectors;
        let dd = sectors(h, TwoFloat::from);
        let (le, ve) = lowest_pair(&dd.even)?;
        let (_, vo) = lowest_pair(&dd.odd)?;
        let mut overlap = TwoFloat::from(0.0);
        for i in 1..ve.len() {
            overlap += ve[i] * vo[i - 1];
        }
        let sqrt2 = TwoFloat::from(2.0).sqrt();
        let om = (dd.hop * sqrt2 * ve[0] * vo[0]).quot(TwoFloat::from(2.0) * overlap);
        omega = f64::from(om);
        lambda1 = f64::from(le);
        lambda2 = f64::from(le + TwoFloat::from(2.0) * om);
        let e = even_to_full(&ve, &grid);
        let o = odd_to_full(&vo, &grid);
        let r2 = TwoFloat::from(1.0).quot(sqrt2);
        phi1 = e.iter().map(|&x| f64::from(x)).collect();
        phi2 = o.iter().map(|&x| f64::from(x)).collect();
        phi_r = e.iter().zip(&o).map(|(&a, &b)| f64::from((a + b) * r2)).collect();
        phi_l = e.iter().zip(&o).map(|(&a, &b)| f64::from((a - b) * r2)).collect();
        let mut rest = Vec::new();
        for k in 1..=k_extra.min(sec.even.len() - 1) {
            rest.push(sec.even.eigenvalue(k)?);
        }
        for k in 1..=k_extra.min(sec.odd.len() - 1) {
            rest.push(sec.odd.eigenvalue(k)?);
        }
        rest.sort_by(f64::total_cmp);
        higher.extend(rest.into_iter().take(k_extra));
    }

    let dx = grid.dx();
    let residuals = [residual(h, &phi1, lambda1), residual(h, &phi2, lambda2)];
    for (i, (&r, l)) in residuals.iter().zip([lambda1, lambda2]).enumerate() {
        if !(r <= 1e-8 * l.abs().max(tol)) {
            return Err(Error::Solver {
                message: format!("eigenvector {} residual {r:e} exceeds 1e-8 |lambda|", i + 1),
                residuals: residuals.to_vec(),
            });
        }
    }
    // lambda2 - lambda1 = 2 omega can be below f64 resolution of lambda1, so
    // the ordering is certified by the splitting itself.
    if !(omega > 0.0) || lambda2 < lambda1 {
        return Err(Error::Solver {
            message: format!("doublet not ordered: omega = {omega:e}"),
            residuals: residuals.to_vec(),
        });
    }

    let c4: f64 = phi_r.iter().map(|v| v.powi(4)).sum::<f64>() * dx;
    let gap3 = higher[0] - lambda2;
    let truncation_defect =
        [1, n - 1].iter().map(|&j| phi1[j].abs().max(phi2[j].abs())).fold(0.0, f64::max);
    let leakage = phi_r[..grid.center()].iter().map(|v| v * v).sum::<f64>() * dx
        + 0.5 * phi_r[grid.center()].powi(2) * dx;

    let basis = DoubletBasis {
        grid,
        hbar: h.hbar(),
        mass: h.mass(),
        potential: h.potential().to_vec(),
        lambda1,
        lambda2,
        omega,
        big_omega: lambda1 + omega,
        gap3,
        higher,
        c: c4,
        c_norm: c4.sqrt(),
        method,
        residuals,
        truncation_defect,
        leakage,
        phi1,
        phi2,
        phi_r,
        phi_l,
    };

    if h.validation().is_some() {
        if !(basis.omega > 0.0) {
            return Err(Error::Model(format!("non-positive splitting omega = {:e}", basis.omega)));
        }
        if basis.gap3 <= 2.0 * basis.omega {
            return Err(Error::Model(format!(
                "doublet not separated: lambda3 - lambda2 = {} <= 2 omega = {}",
                basis.gap3,
                2.0 * basis.omega
            )));
        }
        if basis.leakage > 10.0 * basis.omega {
            return Err(Error::Model(format!(
                "phiR not localized: mass {:e} on the left half-line exceeds 10 omega",
                basis.leakage
            )));
        }
        if basis.truncation_defect >= 1e-12 {
            return Err(Error::Model(format!(
                "domain too small: eigenvectors reach {:e} at the edge",
                basis.truncation_defect
            )));
        }
    }
    Ok(basis)
}

/// `max_j |phi_R(x_j) phi_L(x_j)|`.
pub fn overlap_sup(basis: &DoubletBasis) -> f64 {
    basis.phi_r.iter().zip(&basis.phi_l).map(|(r, l)| (r * l).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpRow {
    pub state: String,
    pub p: f64,
    /// `||phi||_p hbar^((p - 2)/(4p))`.
    pub scaled_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub hbar: f64,
    pub rows: Vec<LpRow>,
}

impl LpReport {
    pub fn value(&self, state: &str, p: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.state == state && r.p == p).map(|r| r.scaled_norm)
    }
}

/// `hbar^((p-2)/(4p))`, with the `p = inf` limit `hbar^(1/4)`.
pub(crate) fn lp_weight(hbar: f64, p: f64) -> f64 {
    if p.is_infinite() {
        hbar.powf(0.25)
    } else {
        hbar.powf((p - 2.0) / (4.0 * p))
    }
}

/// Scaled `L^p` norms of `phi_1`, `phi_2` for `p in {2, 4, inf}`.
pub fn eigenstate_lp_report(basis: &DoubletBasis, hbar: f64) -> LpReport {
    let mut rows = Vec::new();
    for (name, w) in [("phi1", basis.phi1_wave()), ("phi2", basis.phi2_wave())] {
        for p in [2.0, 4.0, f64::INFINITY] {
            let v = lp_norm(&w, p).expect("p >= 1") * lp_weight(hbar, p);
            rows.push(LpRow { state: name.into(), p, scaled_norm: v });
        }
    }
    LpReport { hbar, rows }
}
