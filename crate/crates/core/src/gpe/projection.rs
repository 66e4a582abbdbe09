use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::EvolutionConfig;
use crate::error::Result;
use crate::grid::Wavefunction;
use crate::spectral::DoubletBasis;

/// `psi = a_R phi_R + a_L phi_L + psi_c` with `psi_c` orthogonal to the doublet.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionDecomposition {
    pub a_r: Complex64,
    pub a_l: Complex64,
    pub psi_c: Wavefunction,
    pub psi_c_norm: f64,
    /// `| |a_R|^2 + |a_L|^2 + ||psi_c||^2 - ||psi||^2 |`.
    pub completeness_defect: f64,
    /// `max(|<phi_R, psi_c>|, |<phi_L, psi_c>|)`.
    pub orthogonality_defect: f64,
}

fn real_inner(phi: &[f64], psi: &[Complex64], dx: f64) -> Complex64 {
    phi.iter().zip(psi).map(|(p, v)| v * p).sum::<Complex64>() * dx
}

pub fn project_doublet(psi: &Wavefunction, basis: &DoubletBasis) -> Result<ProjectionDecomposition> {
    basis.grid().ensure_same(psi.grid())?;
    let dx = psi.grid().dx();
    let v = psi.values();
    let a_r = real_inner(basis.phi_r(), v, dx);
    let a_l = real_inner(basis.phi_l(), v, dx);
    let c: Vec<Complex64> = v
        .iter()
        .zip(basis.phi_r().iter().zip(basis.phi_l()))
        .map(|(p, (r, l))| p - a_r * r - a_l * l)
        .collect();
    let psi_c = Wavefunction::new(*psi.grid(), c)?;
    let psi_c_norm = psi_c.norm();
    let total = psi.norm().powi(2);
    let completeness_defect =
        (a_r.norm_sqr() + a_l.norm_sqr() + psi_c_norm * psi_c_norm - total).abs();
    let orthogonality_defect = real_inner(basis.phi_r(), psi_c.values(), dx)
        .norm()
        .max(real_inner(basis.phi_l(), psi_c.values(), dx).norm());
    Ok(ProjectionDecomposition { a_r, a_l, psi_c, psi_c_norm, completeness_defect, orthogonality_defect })
}

/// `(r_R, r_L)` from the amplitudes and the continuum part, written so that
/// every term carries a factor of the complementary field and no
/// difference of O(1) quantities is formed.
///
/// With `u = a_R phi_R` and `v = a_L phi_L + psi_c`:
///
/// ```text
/// r_R = <phi_R, |psi|^2 v> + a_R integral phi_R^2 (conj(a_R) phi_R v + a_R phi_R conj(v) + |v|^2)
/// ```
///
/// and symmetrically for `r_L`.
pub(crate) fn remainders_from_parts(
    basis: &DoubletBasis,
    a_r: Complex64,
    a_l: Complex64,
    psi_c: &[Complex64],
) -> (Complex64, Complex64) {
    let dx = basis.grid().dx();
    let pr = basis.phi_r();
    let pl = basis.phi_l();
    let mut r_r = Complex64::new(0.0, 0.0);
    let mut r_l = Complex64::new(0.0, 0.0);
    let mut s_r = Complex64::new(0.0, 0.0);
    let mut s_l = Complex64::new(0.0, 0.0);
    for j in 0..pr.len() {
        let c = psi_c[j];
        let u_r = a_r * pr[j];
        let u_l = a_l * pl[j];
        let v_r = u_l + c;
        let v_l = u_r + c;
        let psi = u_r + v_r;
        let rho = psi.norm_sqr();
        r_r += rho * v_r * pr[j];
        r_l += rho * v_l * pl[j];
        let pr2 = pr[j] * pr[j];
        let pl2 = pl[j] * pl[j];
        s_r += pr2 * (a_r.conj() * pr[j] * v_r + a_r * pr[j] * v_r.conj() + v_r.norm_sqr());
        s_l += pl2 * (a_l.conj() * pl[j] * v_l + a_l * pl[j] * v_l.conj() + v_l.norm_sqr());
    }
    ((r_r + a_r * s_r) * dx, (r_l + a_l * s_l) * dx)
}

/// Remainders `r_R`, `r_L` of the projected equations for `psi`.
pub fn remainder_terms(psi: &Wavefunction, basis: &DoubletBasis) -> Result<(Complex64, Complex64)> {
    let p = project_doublet(psi, basis)?;
    Ok(remainders_from_parts(basis, p.a_r, p.a_l, p.psi_c.values()))
}

/// `E = (hbar^2/2m) ||D psi||^2 + <V psi, psi> + (eps/2) ||psi^2||^2`.
///
/// `D` is the periodic forward difference, so the kinetic term equals the
/// quadratic form of the same three-point Laplacian used by every propagator.
pub fn energy(psi: &Wavefunction, cfg: &EvolutionConfig) -> Result<f64> {
    cfg.basis.grid().ensure_same(psi.grid())?;
    Ok(energy_parts(psi.values(), &cfg.basis, cfg.epsilon))
}

pub(crate) fn gradient_norm_sqr(v: &[Complex64], dx: f64) -> f64 {
    let n = v.len();
    (0..n).map(|j| (v[(j + 1) % n] - v[j]).norm_sqr()).sum::<f64>() / dx
}

pub(crate) fn energy_parts(v: &[Complex64], basis: &DoubletBasis, epsilon: f64) -> f64 {
    let dx = basis.grid().dx();
    let hbar = basis.hbar();
    let kinetic = hbar * hbar / (2.0 * basis.mass()) * gradient_norm_sqr(v, dx);
    let mut pot = 0.0;
    let mut quartic = 0.0;
    for (p, w) in v.iter().zip(basis.potential()) {
        let rho = p.norm_sqr();
        pot += w * rho;
        quartic += rho * rho;
    }
    kinetic + pot * dx + 0.5 * epsilon * quartic * dx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSample {
    pub t: f64,
    /// `||psi||_2`.
    pub l2: f64,
    /// `||psi||_4 hbar^(1/8)`.
    pub l4: f64,
    /// `||psi||_inf hbar^(1/4)`.
    pub linf: f64,
    /// `||d psi/dx|| hbar^(1/2)`.
    pub gradient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpTrajectoryReport {
    pub hbar: f64,
    pub rows: Vec<LpSample>,
}

impl LpTrajectoryReport {
    /// `max / min` of a column over the samples.
    pub fn spread(&self, column: impl Fn(&LpSample) -> f64) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .map(column)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        hi / lo
    }
}

/// Scaled norms of every stored state.
pub fn lp_diagnostics(traj: &super::Trajectory, hbar: f64) -> LpTrajectoryReport {
    use crate::grid::lp_norm;
    use crate::spectral::lp_weight;
    let rows = traj
        .samples
        .iter()
        .zip(&traj.states)
        .map(|(s, psi)| {
            let dx = psi.grid().dx();
            LpSample {
                t: s.t,
                l2: lp_norm(psi, 2.0).expect("p >= 1"),
                l4: lp_norm(psi, 4.0).expect("p >= 1") * lp_weight(hbar, 4.0),
                linf: lp_norm(psi, f64::INFINITY).expect("p >= 1") * lp_weight(hbar, f64::INFINITY),
                gradient: gradient_norm_sqr(psi.values(), dx).sqrt() * hbar.sqrt(),
            }
        })
        .collect();
    LpTrajectoryReport { hbar, rows }
}
