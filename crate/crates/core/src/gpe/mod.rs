//! Time-dependent Gross-Pitaevskii propagation in the double well.
//!
//! [`propagate`] evolves `i hbar psi_t = (H0 - Omega) psi + eps |psi|^2 psi`
//! with one of three integrators (see [`Method`]) and samples conservation
//! and projection diagnostics along the way. [`stability_experiment`]
//! compares the field against the closed two-mode system across `hbar`.

mod config;
mod modal;
mod projection;
mod stability;
mod stepper;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use config::{EvolutionConfig, Method, DEFAULT_ETA_MAX};
pub use modal::SPAN_TOL;
pub use projection::{
    energy, lp_diagnostics, project_doublet, remainder_terms, LpSample, LpTrajectoryReport,
    ProjectionDecomposition,
};
pub use stability::{
    stability_experiment, InitialState, StabilityConfig, StabilityReport, StabilityRow,
};

use crate::error::{Error, Result};
use crate::grid::{center_of_mass, Wavefunction};
use modal::ModalIntegrator;
use projection::energy_parts;
use stepper::{CrankNicolson, SplitStep};

/// Largest tolerated `| ||psi(t)|| - ||psi0|| |` before the run is aborted.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
/// Threshold of the step-size warning `dt max|V - Omega + eps |psi|^2| / hbar`.
pub const PHASE_STEP_WARNING: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    /// `omega t / hbar`.
    pub tau: f64,
    pub norm: f64,
    pub energy: f64,
    pub a_r: Complex64,
    pub a_l: Complex64,
    pub psi_c_norm: f64,
    /// `|a_R|^2 - |a_L|^2`.
    pub z: f64,
    pub center_of_mass: f64,
    pub completeness_defect: f64,
    pub orthogonality_defect: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub method: Method,
    pub dt: f64,
    pub steps: usize,
    pub rotating_frame: bool,
    pub samples: Vec<Sample>,
    /// Field at every sample, in the frame of the run.
    pub states: Vec<Wavefunction>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    fn column_drift(&self, f: impl Fn(&Sample) -> f64) -> f64 {
        let first = f(&self.samples[0]);
        self.samples.iter().map(|s| (f(s) - first).abs()).fold(0.0, f64::max)
    }

    /// `max_t | ||psi(t)|| - ||psi0|| |`.
    pub fn norm_drift(&self) -> f64 {
        self.column_drift(|s| s.norm)
    }

    /// `max_t |E(t) - E(0)| / |E(0)|`.
    pub fn energy_drift(&self) -> f64 {
        self.column_drift(|s| s.energy) / self.samples[0].energy.abs()
    }

    pub fn max_completeness_defect(&self) -> f64 {
        self.samples.iter().map(|s| s.completeness_defect).fold(0.0, f64::max)
    }

    pub fn max_psi_c_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.psi_c_norm).fold(0.0, f64::max)
    }

    pub fn final_state(&self) -> &Wavefunction {
        self.states.last().expect("a trajectory holds at least the initial state")
    }
}

/// Field at `t` in the frame requested by `cfg`, from the rotating-frame field.
fn to_frame(v: Vec<Complex64>, cfg: &EvolutionConfig, tau: f64) -> Vec<Complex64> {
    if cfg.rotating_frame {
        return v;
    }
    let b = &cfg.basis;
    let phase = Complex64::from_polar(1.0, -(b.big_omega / b.omega) * tau);
    v.into_iter().map(|p| p * phase).collect()
}

fn make_sample(step: usize, tau: f64, v: Vec<Complex64>, cfg: &EvolutionConfig) -> Result<(Sample, Wavefunction)> {
    let b = &cfg.basis;
    let t = b.hbar() * tau / b.omega;
    let psi = Wavefunction::new(*b.grid(), v)
        .map_err(|e| Error::Integration { time: t, message: e.to_string() })?;
    let p = project_doublet(&psi, b)?;
    let sample = Sample {
        step,
        t,
        tau,
        norm: psi.norm(),
        energy: energy_parts(psi.values(), b, cfg.epsilon),
        a_r: p.a_r,
        a_l: p.a_l,
        psi_c_norm: p.psi_c_norm,
        z: p.a_r.norm_sqr() - p.a_l.norm_sqr(),
        center_of_mass: center_of_mass(&psi, &cfg.observable)?,
        completeness_defect: p.completeness_defect,
        orthogonality_defect: p.orthogonality_defect,
    };
    Ok((sample, psi))
}

struct Recorder {
    samples: Vec<Sample>,
    states: Vec<Wavefunction>,
    norm0: f64,
}

impl Recorder {
    fn push(&mut self, sample: Sample, psi: Wavefunction) -> Result<()> {
        if self.samples.is_empty() {
            self.norm0 = sample.norm;
        }
        let drift = (sample.norm - self.norm0).abs();
        if !(drift <= NORM_DRIFT_LIMIT) {
            return Err(Error::Integration {
                time: sample.t,
                message: format!("norm drift {drift:e} exceeds {NORM_DRIFT_LIMIT:e}"),
            });
        }
        self.samples.push(sample);
        self.states.push(psi);
        Ok(())
    }
}

fn check_initial(psi0: &Wavefunction, cfg: &EvolutionConfig) -> Result<()> {
    cfg.validate()?;
    cfg.basis.grid().ensure_same(psi0.grid())?;
    let n = psi0.norm();
    if !((n - 1.0).abs() <= 1e-10) {
        return Err(Error::Config(format!("initial state must be normalized, ||psi0|| = {n}")));
    }
    let p = project_doublet(psi0, &cfg.basis)?;
    if p.psi_c_norm > SPAN_TOL && !cfg.allow_general_initial {
        return Err(Error::Config(format!(
            "initial state has a component of norm {:e} outside the doublet span",
            p.psi_c_norm
        )));
    }
    Ok(())
}

fn is_sample_step(n: usize, steps: usize, stride: usize) -> bool {
    n % stride == 0 || n == steps
}

/// Evolve `psi0` under `cfg` and sample every `cfg.stride` steps (plus the final step).
///
/// Fails with [`Error::Integration`] carrying the sample time when the norm
/// drifts by more than [`NORM_DRIFT_LIMIT`].
pub fn propagate(psi0: &Wavefunction, cfg: &EvolutionConfig) -> Result<Trajectory> {
    check_initial(psi0, cfg)?;
    match cfg.method {
        Method::Spectral => propagate_modal(psi0, cfg),
        Method::SplitStep | Method::CrankNicolson => propagate_field(psi0, cfg),
    }
}

fn propagate_modal(psi0: &Wavefunction, cfg: &EvolutionConfig) -> Result<Trajectory> {
    let basis = &cfg.basis;
    let h = cfg.dtau();
    let steps = cfg.steps();
    let mut integrator = ModalIntegrator::new(basis, cfg.continuum_modes, cfg.epsilon, cfg.eta(), h)?;
    let (mut s, warnings) = integrator.initial_state(psi0, cfg.allow_general_initial)?;
    let mut rec = Recorder { samples: Vec::new(), states: Vec::new(), norm0: 0.0 };
    for n in 0..=steps {
        if n > 0 {
            integrator.step(&mut s);
        }
        if is_sample_step(n, steps, cfg.stride) {
            let tau = n as f64 * h;
            let v = to_frame(integrator.reconstruct(&s), cfg, tau);
            let (mut sample, psi) = make_sample(n, tau, v, cfg)?;
            // The projected continuum norm is cancellation noise at small omega.
            sample.psi_c_norm = s.continuum_norm();
            rec.push(sample, psi)?;
        }
    }
    Ok(Trajectory {
        method: cfg.method,
        dt: cfg.dt,
        steps,
        rotating_frame: cfg.rotating_frame,
        samples: rec.samples,
        states: rec.states,
        warnings,
    })
}

enum FieldStepper {
    Split(SplitStep),
    Crank(CrankNicolson),
}

impl FieldStepper {
    fn step(&mut self, psi: &mut [Complex64]) {
        match self {
            FieldStepper::Split(s) => s.step(psi),
            FieldStepper::Crank(s) => s.step(psi),
        }
    }
}

fn propagate_field(psi0: &Wavefunction, cfg: &EvolutionConfig) -> Result<Trajectory> {
    let basis = &cfg.basis;
    let shift = if cfg.rotating_frame { basis.big_omega } else { 0.0 };
    let mut warnings = Vec::new();
    let phase_rate = basis
        .potential()
        .iter()
        .zip(psi0.values())
        .map(|(v, p)| (v - shift + cfg.epsilon * p.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let phase_step = cfg.dt * phase_rate / basis.hbar();
    if phase_step > PHASE_STEP_WARNING {
        warnings.push(format!(
            "dt max|V - Omega + eps|psi|^2| / hbar = {phase_step:.3e} exceeds {PHASE_STEP_WARNING}"
        ));
    }
    let mut stepper = match cfg.method {
        Method::CrankNicolson => FieldStepper::Crank(CrankNicolson::new(basis, cfg.epsilon, cfg.dt, shift)),
        _ => FieldStepper::Split(SplitStep::new(basis, cfg.epsilon, cfg.dt, shift)),
    };
    let steps = cfg.steps();
    let h = cfg.dtau();
    let mut v = psi0.values().to_vec();
    let mut rec = Recorder { samples: Vec::new(), states: Vec::new(), norm0: 0.0 };
    for n in 0..=steps {
        if n > 0 {
            stepper.step(&mut v);
        }
        if is_sample_step(n, steps, cfg.stride) {
            let (sample, psi) = make_sample(n, n as f64 * h, v.clone(), cfg)?;
            rec.push(sample, psi)?;
        }
    }
    Ok(Trajectory {
        method: cfg.method,
        dt: cfg.dt,
        steps,
        rotating_frame: cfg.rotating_frame,
        samples: rec.samples,
        states: rec.states,
        warnings,
    })
}

/// Finite-difference check of the projected equation along a rotating-frame
/// trajectory, in slow time:
///
/// ```text
/// i a_R' = -a_L + eta |a_R|^2 a_R + (eps / omega) r_R
/// ```
///
/// and symmetrically for `a_L`, with `a'` from central differences of the
/// samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub max_residual: f64,
    /// Ten times the truncation estimate `|third difference| / (6 dtau)` of the central difference.
    pub tolerance: f64,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

pub fn remainder_consistency(traj: &Trajectory, cfg: &EvolutionConfig) -> Result<ConsistencyReport> {
    if !traj.rotating_frame {
        return Err(Error::Usage("remainder consistency needs a rotating-frame trajectory".into()));
    }
    let s = &traj.samples;
    if s.len() < 5 {
        return Err(Error::Usage("remainder consistency needs at least five samples".into()));
    }
    let b = &cfg.basis;
    let eta = cfg.eta();
    let g = cfg.epsilon / b.omega;
    let i = Complex64::i();
    let mut max_residual = 0.0f64;
    let mut max_third = 0.0f64;
    let mut dtau = f64::INFINITY;
    for j in 1..s.len() - 1 {
        let (lo, hi) = (&s[j - 1], &s[j + 1]);
        if hi.step - s[j].step != s[j].step - lo.step {
            continue;
        }
        let d = 0.5 * (hi.tau - lo.tau);
        dtau = dtau.min(d);
        let (r_r, r_l) = remainder_terms(&traj.states[j], b)?;
        let (ar, al) = (s[j].a_r, s[j].a_l);
        let dr = (hi.a_r - lo.a_r) / (2.0 * d);
        let dl = (hi.a_l - lo.a_l) / (2.0 * d);
        let res_r = i * dr - (-al + eta * ar.norm_sqr() * ar + g * r_r);
        let res_l = i * dl - (-ar + eta * al.norm_sqr() * al + g * r_l);
        max_residual = max_residual.max(res_r.norm()).max(res_l.norm());
        if j + 2 < s.len() {
            let third = |f: fn(&Sample) -> Complex64| {
                (f(&s[j + 2]) - 3.0 * f(&s[j + 1]) + 3.0 * f(&s[j]) - f(&s[j - 1])).norm()
            };
            max_third = max_third.max(third(|x| x.a_r)).max(third(|x| x.a_l));
        }
    }
    Ok(ConsistencyReport { max_residual, tolerance: 10.0 * max_third / (6.0 * dtau) })
}
