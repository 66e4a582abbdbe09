use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EvolutionConfig, Method, DEFAULT_ETA_MAX};
use super::modal::ModalIntegrator;
use super::projection::remainder_terms;
use super::{make_sample, Sample, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Wavefunction};
use crate::spectral::{assemble_hamiltonian, lowest_doublet, DoubletBasis, PotentialSpec};
use crate::twomode::integrate_two_mode;

/// Initial state in the doublet span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum InitialState {
    #[serde(rename = "phi1")]
    Phi1,
    #[serde(rename = "phi2")]
    Phi2,
    #[serde(rename = "phiR")]
    #[default]
    PhiR,
    #[serde(rename = "phiL")]
    PhiL,
    /// `c1 phi_1 + c2 phi_2`, each coefficient as `[re, im]`; must be normalized.
    #[serde(rename = "custom")]
    Coefficients { c1: [f64; 2], c2: [f64; 2] },
}

impl InitialState {
    pub fn build(&self, basis: &DoubletBasis) -> Result<Wavefunction> {
        match *self {
            InitialState::Phi1 => Ok(basis.phi1_wave()),
            InitialState::Phi2 => Ok(basis.phi2_wave()),
            InitialState::PhiR => Ok(basis.phi_r_wave()),
            InitialState::PhiL => Ok(basis.phi_l_wave()),
            InitialState::Coefficients { c1, c2 } => {
                let c1 = Complex64::new(c1[0], c1[1]);
                let c2 = Complex64::new(c2[0], c2[1]);
                let n = c1.norm_sqr() + c2.norm_sqr();
                if !((n - 1.0).abs() <= 1e-10) {
                    return Err(Error::Config(format!(
                        "|c1|^2 + |c2|^2 = {n} must equal 1"
                    )));
                }
                let values =
                    basis.phi1().iter().zip(basis.phi2()).map(|(a, b)| c1 * a + c2 * b).collect();
                Wavefunction::new(*basis.grid(), values)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub potential: PotentialSpec,
    pub half_width: f64,
    pub n_points: usize,
    pub mass: f64,
    pub hbars: Vec<f64>,
    pub eta: f64,
    pub tau_prime: f64,
    pub dtau: f64,
    pub psi0: InitialState,
    pub continuum_modes: usize,
    /// Steps between trajectory samples; the maxima use every step.
    pub stride: usize,
}

impl StabilityConfig {
    pub fn new(potential: PotentialSpec, half_width: f64, n_points: usize, hbars: Vec<f64>, eta: f64) -> Self {
        Self {
            potential,
            half_width,
            n_points,
            mass: 1.0,
            hbars,
            eta,
            tau_prime: 2.0 * std::f64::consts::PI,
            dtau: 1e-3,
            psi0: InitialState::PhiR,
            continuum_modes: 64,
            stride: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub hbar: f64,
    pub omega: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub c: f64,
    /// `max |a_R - b_R|` over every step.
    pub max_dev_r: f64,
    pub max_dev_l: f64,
    pub max_psi_c: f64,
    pub tau_prime: f64,
    /// `hbar tau' / omega`.
    pub t_horizon: f64,
    /// `max |E - V_min| / (omega + hbar + |eps| hbar^(-1/2))` over the samples.
    pub energy_ratio: f64,
    /// `|eps| / hbar^2`.
    pub eps_over_hbar2: f64,
    /// `max(|r_R|, |r_L|) hbar^(1/2)` over the samples.
    pub remainder_scaled: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Ordered by decreasing `hbar`.
    pub rows: Vec<StabilityRow>,
    /// `max_dev_r` strictly decreases with `hbar`.
    pub deviation_monotone: bool,
    /// `max_psi_c` strictly decreases with `hbar`.
    pub psi_c_monotone: bool,
    /// `max_psi_c <= omega^(1/2)` at the smallest `hbar`.
    pub psi_c_bound: bool,
    /// `eps / hbar^2` strictly decreases with `hbar`.
    pub eps_over_hbar2_decreasing: bool,
    pub monotone: bool,
    #[serde(skip)]
    pub trajectories: Vec<Trajectory>,
}

fn strictly_decreasing(v: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = v.collect();
    v.windows(2).all(|w| w[1] < w[0])
}

fn run_one(cfg: &StabilityConfig, hbar: f64) -> Result<(StabilityRow, Trajectory)> {
    let grid = Grid1D::new(cfg.half_width, cfg.n_points)?;
    let h = assemble_hamiltonian(grid, &cfg.potential, hbar, cfg.mass)?;
    let basis = Arc::new(lowest_doublet(&h, 1)?);
    let eps = cfg.eta * basis.omega / basis.c;
    let mut ecfg = EvolutionConfig::new(basis.clone(), eps);
    ecfg.method = Method::Spectral;
    ecfg.dt = hbar * cfg.dtau / basis.omega;
    ecfg.t_end = hbar * cfg.tau_prime / basis.omega;
    ecfg.stride = cfg.stride;
    ecfg.continuum_modes = cfg.continuum_modes;
    ecfg.validate()?;

    let psi0 = cfg.psi0.build(&basis)?;
    let mut integ = ModalIntegrator::new(&basis, cfg.continuum_modes, eps, cfg.eta, cfg.dtau)?;
    let (mut s, warnings) = integ.initial_state(&psi0, false)?;
    let reference = integrate_two_mode(&s.b, cfg.eta, cfg.tau_prime, cfg.dtau)?;
    let steps = reference.len() - 1;

    let v_min = cfg.potential.v_min();
    let energy_scale = basis.omega + hbar + eps.abs() / hbar.sqrt();
    let (mut dev_r, mut dev_l, mut psi_c) = (0.0f64, 0.0f64, 0.0f64);
    let (mut energy_ratio, mut remainder) = (0.0f64, 0.0f64);
    let mut samples: Vec<Sample> = Vec::new();
    for (n, (tau, b)) in reference.iter().enumerate() {
        if n > 0 {
            integ.step(&mut s);
        }
        dev_r = dev_r.max(((s.b.b_r - b.b_r) + s.d[0]).norm());
        dev_l = dev_l.max(((s.b.b_l - b.b_l) + s.d[1]).norm());
        psi_c = psi_c.max(s.continuum_norm());
        if n % cfg.stride == 0 || n == steps {
            let (mut sample, psi) = make_sample(n, *tau, integ.reconstruct(&s), &ecfg)?;
            sample.psi_c_norm = s.continuum_norm();
            energy_ratio = energy_ratio.max((sample.energy - v_min).abs() / energy_scale);
            let (r_r, r_l) = remainder_terms(&psi, &basis)?;
            remainder = remainder.max(r_r.norm().max(r_l.norm()) * hbar.sqrt());
            samples.push(sample);
        }
    }
    let row = StabilityRow {
        hbar,
        omega: basis.omega,
        eta: cfg.eta,
        epsilon: eps,
        c: basis.c,
        max_dev_r: dev_r,
        max_dev_l: dev_l,
        max_psi_c: psi_c,
        tau_prime: cfg.tau_prime,
        t_horizon: ecfg.t_end,
        energy_ratio,
        eps_over_hbar2: eps.abs() / (hbar * hbar),
        remainder_scaled: remainder,
        steps,
    };
    let traj = Trajectory {
        method: Method::Spectral,
        dt: ecfg.dt,
        steps,
        rotating_frame: true,
        samples,
        states: Vec::new(),
        warnings,
    };
    Ok((row, traj))
}

/// Field against two-mode dynamics at fixed `eta` for each `hbar`, with
/// `eps = eta omega / c` chosen per `hbar`. The points run in parallel; each
/// run is sequential and the rows are ordered by decreasing `hbar`.
pub fn stability_experiment(cfg: &StabilityConfig) -> Result<StabilityReport> {
    if cfg.hbars.len() < 3 {
        return Err(Error::Usage(format!(
            "stability experiment needs >= 3 hbar values, got {}",
            cfg.hbars.len()
        )));
    }
    if !(cfg.tau_prime > 0.0 && cfg.tau_prime.is_finite()) {
        return Err(Error::Config(format!("tau_prime must be positive, got {}", cfg.tau_prime)));
    }
    if cfg.eta.abs() > DEFAULT_ETA_MAX {
        return Err(Error::Config(format!("|eta| = {} exceeds the cap {DEFAULT_ETA_MAX}", cfg.eta.abs())));
    }
    if cfg.stride == 0 {
        return Err(Error::Config("stride must be >= 1".into()));
    }
    let mut hbars = cfg.hbars.clone();
    hbars.sort_by(|a, b| b.total_cmp(a));
    if hbars.windows(2).any(|w| w[0] == w[1]) || hbars.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::Usage("hbar values must be positive and distinct".into()));
    }
    let runs: Vec<(StabilityRow, Trajectory)> = hbars
        .par_iter()
        .map(|&hbar| run_one(cfg, hbar).map_err(|e| e.context(&format!("hbar = {hbar}"))))
        .collect::<Result<_>>()?;
    let (rows, trajectories): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let deviation_monotone = strictly_decreasing(rows.iter().map(|r| r.max_dev_r));
    let psi_c_monotone = strictly_decreasing(rows.iter().map(|r| r.max_psi_c));
    let last = rows.last().expect("at least three rows");
    let psi_c_bound = last.max_psi_c <= last.omega.sqrt();
    let eps_over_hbar2_decreasing = strictly_decreasing(rows.iter().map(|r| r.eps_over_hbar2));
    Ok(StabilityReport {
        monotone: deviation_monotone && psi_c_monotone,
        rows,
        deviation_monotone,
        psi_c_monotone,
        psi_c_bound,
        eps_over_hbar2_decreasing,
        trajectories,
    })
}
