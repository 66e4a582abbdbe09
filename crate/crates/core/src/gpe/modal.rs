//! Propagation in the eigenbasis of the linear Hamiltonian, in slow time.
//!
//! The state is `psi = A_R phi_R + A_L phi_L + sum_k c_k chi_k` with `chi_k`
//! the lowest continuum eigenvectors of each parity sector. The doublet
//! amplitudes are carried as `A = B + D`, where `B` solves the closed
//! two-mode system with the same RK4 steps as the stand-alone integrator and
//! `D` is the deviation driven by the remainders and by `psi_c`. The
//! continuum obeys `c_k' = L_k c_k + N_k` with `L_k = -i (lambda_k - Omega) / omega`,
//! advanced by ETDRK4 so that `|L_k| dtau >> 1` is harmless.

use num_complex::Complex64;

use super::projection::{project_doublet, remainders_from_parts};
use crate::error::{Error, Result};
use crate::grid::{dot_real, Wavefunction};
use crate::spectral::{even_to_full, odd_to_full, sectors, DoubletBasis, SymTridiag};
use crate::twomode::{rk4_stages, TwoModeState};

/// Largest accepted `||Pi_c psi0||` for an initial state in the doublet span.
pub const SPAN_TOL: f64 = 1e-8;

type C = Complex64;

#[derive(Debug, Clone)]
pub(crate) struct ModalState {
    pub b: TwoModeState,
    pub d: [C; 2],
    pub c: Vec<C>,
}

impl ModalState {
    pub fn amplitudes(&self) -> (C, C) {
        (self.b.b_r + self.d[0], self.b.b_l + self.d[1])
    }

    pub fn continuum_norm(&self) -> f64 {
        self.c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn phi_series(z: C) -> [C; 3] {
    let mut out = [C::new(0.0, 0.0); 3];
    for (k, o) in out.iter_mut().enumerate() {
        // sum_j z^j / (j + k + 1)!
        let mut term = C::new(1.0, 0.0);
        for m in 1..=k + 1 {
            term /= m as f64;
        }
        let mut s = term;
        for j in 1..30 {
            term = term * z / (j + k + 1) as f64;
            s += term;
        }
        *o = s;
    }
    out
}

fn phi_closed(z: C) -> [C; 3] {
    let e = z.exp();
    let p1 = (e - 1.0) / z;
    let p2 = (e - 1.0 - z) / (z * z);
    let p3 = (e - 1.0 - z - 0.5 * z * z) / (z * z * z);
    [p1, p2, p3]
}

/// `phi_1, phi_2, phi_3` of the exponential integrator at `z`.
fn phi_functions(z: C) -> [C; 3] {
    if z.norm() < 1.0 {
        phi_series(z)
    } else {
        phi_closed(z)
    }
}

struct EtdCoefficients {
    e_half: C,
    q_half: C,
    e_full: C,
    f1: C,
    f2: C,
    f3: C,
}

impl EtdCoefficients {
    fn new(l: C, h: f64) -> Self {
        let [ph1, _, _] = phi_functions(l * (0.5 * h));
        let [p1, p2, p3] = phi_functions(l * h);
        Self {
            e_half: (l * (0.5 * h)).exp(),
            q_half: ph1 * (0.5 * h),
            e_full: (l * h).exp(),
            f1: (p1 - 3.0 * p2 + 4.0 * p3) * h,
            f2: (2.0 * p2 - 4.0 * p3) * h,
            f3: (4.0 * p3 - p2) * h,
        }
    }
}

fn sector_modes(
    t: &SymTridiag<f64>,
    count: usize,
    to_full: impl Fn(&[f64]) -> Vec<f64>,
    lowest: &[f64],
    dx: f64,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let count = count.min(t.len() - 1);
    let delta = 64.0 * f64::EPSILON * t.norm_inf().max(1.0);
    let mut modes: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut energies = Vec::with_capacity(count);
    for k in 1..=count {
        let lambda = t.eigenvalue(k)?;
        let v = t.inverse_iteration(lambda - delta, 3);
        let mut f = to_full(&v);
        for _ in 0..2 {
            for g in std::iter::once(lowest).chain(modes.iter().map(|m| m.as_slice())) {
                let p = dot_real(g, &f, dx);
                for (a, b) in f.iter_mut().zip(g) {
                    *a -= p * b;
                }
            }
        }
        let nrm = dot_real(&f, &f, dx).sqrt();
        for a in &mut f {
            *a /= nrm;
        }
        modes.push(f);
        energies.push(lambda);
    }
    Ok((modes, energies))
}

pub(crate) struct ModalIntegrator<'a> {
    basis: &'a DoubletBasis,
    modes: Vec<Vec<f64>>,
    eta: f64,
    g: f64,
    h: f64,
    etd: Vec<EtdCoefficients>,
    field: Vec<C>,
}

impl<'a> ModalIntegrator<'a> {
    /// `per_sector` continuum modes of each parity, slow-time step `h`.
    /// `eta` is passed separately so that the two-mode part can match an
    /// independent run bit for bit.
    pub fn new(basis: &'a DoubletBasis, per_sector: usize, epsilon: f64, eta: f64, h: f64) -> Result<Self> {
        let ham = basis.hamiltonian();
        let sec = sectors(&ham, |x| x);
        let grid = *basis.grid();
        let dx = grid.dx();
        let (mut modes, mut energies) =
            sector_modes(&sec.even, per_sector, |v| even_to_full(v, &grid), basis.phi1(), dx)?;
        let (odd_modes, odd_energies) =
            sector_modes(&sec.odd, per_sector, |v| odd_to_full(v, &grid), basis.phi2(), dx)?;
        modes.extend(odd_modes);
        energies.extend(odd_energies);
        let etd = energies
            .iter()
            .map(|&lambda| {
                let l = C::new(0.0, -(lambda - basis.big_omega) / basis.omega);
                EtdCoefficients::new(l, h)
            })
            .collect();
        Ok(Self {
            basis,
            modes,
            eta,
            g: epsilon / basis.omega,
            h,
            etd,
            field: vec![C::new(0.0, 0.0); grid.len()],
        })
    }

    /// Modal state of `psi0`; the two-mode part starts at the doublet amplitudes.
    pub fn initial_state(&self, psi0: &Wavefunction, allow_general: bool) -> Result<(ModalState, Vec<String>)> {
        let p = project_doublet(psi0, self.basis)?;
        let mut warnings = Vec::new();
        let zero = C::new(0.0, 0.0);
        let mut c = vec![zero; self.modes.len()];
        if p.psi_c_norm > SPAN_TOL {
            if !allow_general {
                return Err(Error::Config(format!(
                    "initial state has a component of norm {:e} outside the doublet span",
                    p.psi_c_norm
                )));
            }
            let dx = self.basis.grid().dx();
            for (ck, m) in c.iter_mut().zip(&self.modes) {
                *ck = m.iter().zip(p.psi_c.values()).map(|(a, v)| v * a).sum::<C>() * dx;
            }
            let kept: f64 = c.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let lost = (p.psi_c_norm.powi(2) - kept).max(0.0).sqrt();
            if lost > SPAN_TOL {
                warnings.push(format!("continuum truncation drops a component of norm {lost:e}"));
            }
        }
        let s = ModalState { b: TwoModeState::new(p.a_r, p.a_l), d: [zero, zero], c };
        Ok((s, warnings))
    }

    /// `psi_c` on the grid.
    fn continuum_field(&self, c: &[C], out: &mut [C]) {
        out.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
        for (ck, m) in c.iter().zip(&self.modes) {
            if *ck == C::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(m) {
                *o += ck * a;
            }
        }
    }

    /// Full field in the rotating frame.
    pub fn reconstruct(&self, s: &ModalState) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); self.basis.grid().len()];
        self.continuum_field(&s.c, &mut out);
        let (ar, al) = s.amplitudes();
        for ((o, r), l) in out.iter_mut().zip(self.basis.phi_r()).zip(self.basis.phi_l()) {
            *o += ar * r + al * l;
        }
        out
    }

    /// Slopes of `D` and the continuum forcing at one stage.
    fn forcing(&mut self, b: &TwoModeState, d: &[C; 2], c: &[C], kd: &mut [C; 2], nc: &mut [C]) {
        let i = C::i();
        let dr = d[0];
        let dl = d[1];
        let cubic = |bb: C, dd: C| (2.0 * (bb.conj() * dd).re + dd.norm_sqr()) * (bb + dd) + bb.norm_sqr() * dd;
        kd[0] = i * dl - i * self.eta * cubic(b.b_r, dr);
        kd[1] = i * dr - i * self.eta * cubic(b.b_l, dl);
        if self.g == 0.0 {
            nc.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
            return;
        }
        let mut field = std::mem::take(&mut self.field);
        self.continuum_field(c, &mut field);
        let ar = b.b_r + dr;
        let al = b.b_l + dl;
        let (r_r, r_l) = remainders_from_parts(self.basis, ar, al, &field);
        kd[0] -= i * self.g * r_r;
        kd[1] -= i * self.g * r_l;
        for ((f, r), l) in field.iter_mut().zip(self.basis.phi_r()).zip(self.basis.phi_l()) {
            let psi = *f + ar * r + al * l;
            *f = psi * psi.norm_sqr();
        }
        let dx = self.basis.grid().dx();
        for (n, m) in nc.iter_mut().zip(&self.modes) {
            let proj = m.iter().zip(&field).map(|(a, v)| v * a).sum::<C>() * dx;
            *n = -i * self.g * proj;
        }
        self.field = field;
    }

    /// One step; `b` advances exactly as in the stand-alone two-mode integrator.
    pub fn step(&mut self, s: &mut ModalState) {
        let h = self.h;
        let st = rk4_stages(&s.b, self.eta, h);
        let m = self.modes.len();
        let zero = C::new(0.0, 0.0);
        let mut kd = [[zero; 2]; 4];
        let mut nn = vec![vec![zero; m]; 4];
        let shift = |d: &[C; 2], k: &[C; 2], w: f64| [d[0] + k[0] * w, d[1] + k[1] * w];

        self.forcing(&st.states[0], &s.d, &s.c, &mut kd[0], &mut nn[0]);
        let d2 = shift(&s.d, &kd[0], 0.5 * h);
        let c2: Vec<C> =
            (0..m).map(|k| self.etd[k].e_half * s.c[k] + self.etd[k].q_half * nn[0][k]).collect();
        self.forcing(&st.states[1], &d2, &c2, &mut kd[1], &mut nn[1]);
        let d3 = shift(&s.d, &kd[1], 0.5 * h);
        let c3: Vec<C> =
            (0..m).map(|k| self.etd[k].e_half * s.c[k] + self.etd[k].q_half * nn[1][k]).collect();
        self.forcing(&st.states[2], &d3, &c3, &mut kd[2], &mut nn[2]);
        let d4 = shift(&s.d, &kd[2], h);
        let c4: Vec<C> = (0..m)
            .map(|k| self.etd[k].e_half * c2[k] + self.etd[k].q_half * (2.0 * nn[2][k] - nn[0][k]))
            .collect();
        self.forcing(&st.states[3], &d4, &c4, &mut kd[3], &mut nn[3]);

        let w = h / 6.0;
        for j in 0..2 {
            s.d[j] += (kd[0][j] + 2.0 * kd[1][j] + 2.0 * kd[2][j] + kd[3][j]) * w;
        }
        for k in 0..m {
            let e = &self.etd[k];
            s.c[k] = e.e_full * s.c[k]
                + e.f1 * nn[0][k]
                + e.f2 * (nn[1][k] + nn[2][k])
                + e.f3 * nn[3][k];
        }
        s.b = st.next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_branches_agree_at_switch() {
        for arg in [0.3, 1.7, -2.5, std::f64::consts::FRAC_PI_2] {
            let z = C::from_polar(1.0, arg);
            let (a, b) = (phi_series(z), phi_closed(z));
            for k in 0..3 {
                assert!((a[k] - b[k]).norm() < 1e-14, "{k} {arg}");
            }
        }
    }

    #[test]
    fn phi_functions_small_argument_limits() {
        let p = phi_functions(C::new(0.0, 0.0));
        assert_eq!(p[0], C::new(1.0, 0.0));
        assert!((p[1].re - 0.5).abs() < 1e-16);
        assert!((p[2].re - 1.0 / 6.0).abs() < 1e-16);
    }
}
