//! Position-space propagators on the full grid.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::spectral::DoubletBasis;

/// Strang splitting `K(dt/2) P(dt) K(dt/2)`.
///
/// The kinetic factor uses the Fourier symbol of the periodic three-point
/// Laplacian, `(hbar^2/2m)(4/dx^2) sin^2(pi f / n)`, so the split operator
/// approximates the same discrete Hamiltonian the eigenbasis is computed from.
pub(crate) struct SplitStep {
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    kinetic_half: Vec<Complex64>,
    potential: Vec<f64>,
    dt_over_hbar: f64,
    epsilon: f64,
}

impl SplitStep {
    pub fn new(basis: &DoubletBasis, epsilon: f64, dt: f64, shift: f64) -> Self {
        let n = basis.grid().len();
        let dx = basis.grid().dx();
        let hbar = basis.hbar();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch_len = fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len());
        let pref = hbar * hbar / (2.0 * basis.mass()) * 4.0 / (dx * dx);
        let kinetic_half = (0..n)
            .map(|f| {
                let s = (std::f64::consts::PI * f as f64 / n as f64).sin();
                let k = pref * s * s;
                Complex64::from_polar(1.0 / n as f64, -0.5 * k * dt / hbar)
            })
            .collect();
        Self {
            fft,
            ifft,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            kinetic_half,
            potential: basis.potential().iter().map(|v| v - shift).collect(),
            dt_over_hbar: dt / hbar,
            epsilon,
        }
    }

    fn kinetic(&mut self, psi: &mut [Complex64]) {
        self.fft.process_with_scratch(psi, &mut self.scratch);
        for (p, k) in psi.iter_mut().zip(&self.kinetic_half) {
            *p *= k;
        }
        self.ifft.process_with_scratch(psi, &mut self.scratch);
    }

    pub fn step(&mut self, psi: &mut [Complex64]) {
        self.kinetic(psi);
        for (p, v) in psi.iter_mut().zip(&self.potential) {
            let phase = -(v + self.epsilon * p.norm_sqr()) * self.dt_over_hbar;
            *p *= Complex64::from_polar(1.0, phase);
        }
        self.kinetic(psi);
    }
}

/// Crank-Nicolson on the interior nodes with the Dirichlet closure; the
/// density in the nonlinear term is taken from a predictor step and then from
/// the midpoint of the old state and the prediction.
pub(crate) struct CrankNicolson {
    diag: Vec<f64>,
    hop: f64,
    alpha: f64,
    epsilon: f64,
    rhs: Vec<Complex64>,
    cp: Vec<Complex64>,
    pred: Vec<Complex64>,
    rho: Vec<f64>,
}

impl CrankNicolson {
    pub fn new(basis: &DoubletBasis, epsilon: f64, dt: f64, shift: f64) -> Self {
        let h = basis.hamiltonian();
        let t = h.hopping();
        let n = basis.grid().len();
        Self {
            diag: h.potential().iter().map(|v| 2.0 * t + v - shift).collect(),
            hop: t,
            alpha: 0.5 * dt / basis.hbar(),
            epsilon,
            rhs: vec![Complex64::new(0.0, 0.0); n],
            cp: vec![Complex64::new(0.0, 0.0); n],
            pred: vec![Complex64::new(0.0, 0.0); n],
            rho: vec![0.0; n],
        }
    }

    /// `out = (1 + i alpha H_rho)^{-1} (1 - i alpha H_rho) psi` on nodes `1..n`.
    fn cayley(&mut self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = psi.len();
        let i = Complex64::i();
        let a = self.alpha;
        let t = self.hop;
        for j in 1..n {
            let d = self.diag[j] + self.epsilon * self.rho[j];
            let mut hpsi = psi[j] * d;
            if j > 1 {
                hpsi -= psi[j - 1] * t;
            }
            if j + 1 < n {
                hpsi -= psi[j + 1] * t;
            }
            self.rhs[j] = psi[j] - i * a * hpsi;
        }
        // Thomas elimination: diagonal 1 + i a d_j, off-diagonal -i a t.
        let off = -i * a * t;
        let mut denom = Complex64::new(1.0, 0.0) + i * a * (self.diag[1] + self.epsilon * self.rho[1]);
        self.cp[1] = off / denom;
        out[1] = self.rhs[1] / denom;
        for j in 2..n {
            let dj = Complex64::new(1.0, 0.0) + i * a * (self.diag[j] + self.epsilon * self.rho[j]);
            denom = dj - off * self.cp[j - 1];
            self.cp[j] = off / denom;
            out[j] = (self.rhs[j] - off * out[j - 1]) / denom;
        }
        for j in (1..n - 1).rev() {
            let next = out[j + 1];
            out[j] -= self.cp[j] * next;
        }
        out[0] = Complex64::new(0.0, 0.0);
    }

    pub fn step(&mut self, psi: &mut [Complex64]) {
        for (r, p) in self.rho.iter_mut().zip(psi.iter()) {
            *r = p.norm_sqr();
        }
        let mut pred = std::mem::take(&mut self.pred);
        self.cayley(psi, &mut pred);
        if self.epsilon != 0.0 {
            for ((r, p), q) in self.rho.iter_mut().zip(psi.iter()).zip(&pred) {
                *r = (0.5 * (p + q)).norm_sqr();
            }
            self.cayley(psi, &mut pred);
        }
        psi.copy_from_slice(&pred);
        self.pred = pred;
    }
}
