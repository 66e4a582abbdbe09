//! Batch front end: `dwlab <command> --config <file> --out <dir>`.
//!
//! Every command first writes `config_echo.json`, the parsed configuration
//! with defaults filled in, so a run can be repeated exactly. Results of
//! parallel points are collected in input order and written by one thread.
//!
//! | command     | files                                                        |
//! |-------------|--------------------------------------------------------------|
//! | `spectrum`  | `spectrum.csv`, `spectrum.json`                              |
//! | `evolve`    | `trajectory.csv`, `evolve.json`                              |
//! | `twomode`   | `twomode_ode.csv`, `twomode_analytic.csv`, `twomode.json`    |
//! | `stability` | `stability.json`, `trajectory_hbar_<hbar>.csv` per `hbar`    |
//! | `sweep`     | `regime_map.csv`, `regime_map.json`                          |
//!
//! Exit codes: 0 success, 2 configuration or validation, 3 eigensolver or
//! model, 4 integration, 5 closed form requested at the separatrix.

mod config;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    Format, HbarSpec, NumericsBlock, OutputBlock, PhysicsBlock, PotentialBlock, RunConfig, SweepBlock,
};

use crate::error::{Error, Result};
use crate::gpe::{propagate, EvolutionConfig, Method, Sample, StabilityConfig, StabilityReport};
use crate::spectral::{
    agmon_distance, assemble_hamiltonian, lowest_doublet, splitting_point, splitting_scan,
    validate_potential, SplittingFit, SplittingPoint, ValidationReport,
};
use crate::twomode::{
    classify_motion, critical_eta, imbalance_analytic, integrate_two_mode, max_step, two_mode_params,
    MotionReport, Regime, TwoModeParams, TwoModeState,
};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "DWLAB_THREADS";

/// Subcommand selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Evolve,
    Twomode,
    Stability,
    Sweep,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "dwlab", version, about = "Double-well Gross-Pitaevskii laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Doublet, splitting and barrier integral for one or more hbar.
    Spectrum(RunArgs),
    /// Propagate the field and project onto the doublet.
    Evolve(RunArgs),
    /// Closed-form and integrated two-mode dynamics.
    Twomode(RunArgs),
    /// Field against two-mode dynamics across hbar at fixed eta.
    Stability(RunArgs),
    /// Regime map over (z0, theta0, eta).
    Sweep(RunArgs),
}

impl CliCommand {
    pub fn split(self) -> (Command, RunArgs) {
        match self {
            CliCommand::Spectrum(a) => (Command::Spectrum, a),
            CliCommand::Evolve(a) => (Command::Evolve, a),
            CliCommand::Twomode(a) => (Command::Twomode, a),
            CliCommand::Stability(a) => (Command::Stability, a),
            CliCommand::Sweep(a) => (Command::Sweep, a),
        }
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(e.to_string()))?;
    w.write_record(header).map_err(|e| Error::Config(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Config(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn floats(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| fmt_f64(*x)).collect()
}

pub const TRAJECTORY_COLUMNS: [&str; 10] =
    ["t", "norm", "energy", "re_aR", "im_aR", "re_aL", "im_aL", "psi_c_norm", "z", "center_of_mass"];

fn trajectory_rows(samples: &[Sample]) -> Vec<Vec<String>> {
    samples
        .iter()
        .map(|s| {
            floats(&[
                s.t,
                s.norm,
                s.energy,
                s.a_r.re,
                s.a_r.im,
                s.a_l.re,
                s.a_l.im,
                s.psi_c_norm,
                s.z,
                s.center_of_mass,
            ])
        })
        .collect()
}

/// Outcome of one command: the files written, in order.
pub type Written = Vec<PathBuf>;

struct Sink<'a> {
    dir: &'a Path,
    output: &'a OutputBlock,
    written: Written,
}

impl Sink<'_> {
    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        if self.output.wants(Format::Csv) {
            let p = self.dir.join(name);
            write_csv(&p, header, rows)?;
            self.written.push(p);
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if self.output.wants(Format::Json) {
            let p = self.dir.join(name);
            write_json(&p, value)?;
            self.written.push(p);
        }
        Ok(())
    }
}

/// Runs `command` with `cfg`, writing into `out` (or `cfg.output.directory`).
pub fn execute(command: Command, cfg: &RunConfig, out: Option<&Path>) -> Result<Written> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.directory.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out or set output.directory".into()))?;
    std::fs::create_dir_all(&dir)?;
    let echo = dir.join("config_echo.json");
    let mut echoed = cfg.clone();
    echoed.output.directory = Some(dir.clone());
    write_json(&echo, &echoed)?;
    let mut sink = Sink { dir: &dir, output: &cfg.output, written: vec![echo] };
    match command {
        Command::Spectrum => cmd_spectrum(cfg, &mut sink)?,
        Command::Evolve => cmd_evolve(cfg, &mut sink)?,
        Command::Twomode => cmd_twomode(cfg, &mut sink)?,
        Command::Stability => cmd_stability(cfg, &mut sink)?,
        Command::Sweep => cmd_sweep(cfg, &mut sink)?,
    }
    Ok(sink.written)
}

#[derive(Serialize)]
struct FitSummary<'a> {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    residual_rms: f64,
    gamma0: f64,
    slope_ratio_mass_normalized: f64,
    slope_ratio_bare: f64,
    monotone: bool,
    #[serde(skip)]
    _points: &'a [SplittingPoint],
}

impl<'a> From<&'a SplittingFit> for FitSummary<'a> {
    fn from(f: &'a SplittingFit) -> Self {
        Self {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
            residual_rms: f.residual_rms,
            gamma0: f.gamma0,
            slope_ratio_mass_normalized: f.slope_ratio_mass_normalized,
            slope_ratio_bare: f.slope_ratio_bare,
            monotone: f.monotone,
            _points: &f.points,
        }
    }
}

#[derive(Serialize)]
struct SpectrumSummary<'a> {
    validation: &'a ValidationReport,
    agmon_gamma: f64,
    points: &'a [SplittingPoint],
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<FitSummary<'a>>,
}

fn cmd_spectrum(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let spec = cfg.potential_spec()?;
    let grid = cfg.grid()?;
    let hbars = cfg.hbars()?;
    let m = cfg.physics.m;
    let validation = validate_potential(&spec, &grid);
    validation.require()?;
    let gamma = agmon_distance(&spec, 0.0)?;
    let decreasing = hbars.windows(2).all(|w| w[1] < w[0]);
    let fit = if hbars.len() >= 4 && decreasing {
        Some(splitting_scan(&spec, grid, m, &hbars)?)
    } else {
        None
    };
    let points: Vec<SplittingPoint> = match &fit {
        Some(f) => f.points.clone(),
        None => hbars.par_iter().map(|&h| splitting_point(&spec, grid, m, h)).collect(),
    };
    sink.csv(
        "spectrum.csv",
        &["hbar", "lambda1", "lambda2", "omega", "Omega", "gap3", "c", "overlap_sup", "agmon_gamma"],
        points.iter().map(|p| {
            floats(&[p.hbar, p.lambda1, p.lambda2, p.omega, p.lambda1 + p.omega, p.gap3, p.c, p.overlap_sup, gamma])
        }),
    )?;
    let summary = SpectrumSummary {
        validation: &validation,
        agmon_gamma: gamma,
        points: &points,
        fit: fit.as_ref().map(FitSummary::from),
    };
    sink.json("spectrum.json", &summary)?;
    if let Some(p) = points.iter().find(|p| !p.converged) {
        let message = format!("hbar = {}: {}", p.hbar, p.error.clone().unwrap_or_default());
        return Err(Error::Solver { message, residuals: vec![] });
    }
    Ok(())
}

#[derive(Serialize)]
struct EvolveSummary {
    hbar: f64,
    omega: f64,
    #[serde(rename = "Omega")]
    big_omega: f64,
    c: f64,
    epsilon: f64,
    eta: f64,
    method: Method,
    dt: f64,
    t_end: f64,
    steps: usize,
    norm_drift: f64,
    energy_drift: f64,
    max_completeness_defect: f64,
    max_psi_c_norm: f64,
    regime: Regime,
    k2: f64,
    warnings: Vec<String>,
}

fn cmd_evolve(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let spec = cfg.potential_spec()?;
    let grid = cfg.grid()?;
    let hbar = cfg.single_hbar()?;
    let h = assemble_hamiltonian(grid, &spec, hbar, cfg.physics.m)?;
    let basis = Arc::new(lowest_doublet(&h, 1)?);
    let eps = match (cfg.physics.epsilon, cfg.physics.eta) {
        (Some(e), None) => e,
        (None, Some(eta)) => eta * basis.omega / basis.c,
        _ => return Err(Error::Config("give exactly one of epsilon and eta".into())),
    };
    let n = &cfg.numerics;
    let mut ecfg = EvolutionConfig::new(basis.clone(), eps);
    if let Some(t) = n.t_end {
        ecfg.t_end = t;
    }
    if let Some(dt) = n.dt {
        ecfg.dt = dt;
    }
    ecfg.method = n.method;
    ecfg.stride = n.stride;
    ecfg.continuum_modes = n.continuum_modes;
    ecfg.rotating_frame = n.rotating_frame;
    ecfg.allow_general_initial = n.allow_general_initial;
    let psi0 = cfg.physics.psi0.build(&basis)?;
    let traj = propagate(&psi0, &ecfg)?;
    sink.csv("trajectory.csv", &TRAJECTORY_COLUMNS, trajectory_rows(&traj.samples))?;
    let s0 = &traj.samples[0];
    let matched = two_mode_params(&TwoModeState::new(s0.a_r, s0.a_l), ecfg.eta())?;
    let summary = EvolveSummary {
        hbar,
        omega: basis.omega,
        big_omega: basis.big_omega,
        c: basis.c,
        epsilon: eps,
        eta: ecfg.eta(),
        method: ecfg.method,
        dt: ecfg.dt,
        t_end: ecfg.t_end,
        steps: traj.steps,
        norm_drift: traj.norm_drift(),
        energy_drift: traj.energy_drift(),
        max_completeness_defect: traj.max_completeness_defect(),
        max_psi_c_norm: traj.max_psi_c_norm(),
        regime: matched.regime,
        k2: matched.k2,
        warnings: traj.warnings.clone(),
    };
    sink.json("evolve.json", &summary)
}

pub const TWOMODE_COLUMNS: [&str; 7] = ["tau", "re_bR", "im_bR", "re_bL", "im_bL", "z", "norm_defect"];

#[derive(Serialize)]
struct TwoModeSummary {
    #[serde(flatten)]
    params: TwoModeParams,
    motion: MotionReport,
    critical_eta: Option<f64>,
    dtau: f64,
    tau_end: f64,
    max_discrepancy: Option<f64>,
}

fn cmd_twomode(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let z0 = cfg.physics.z0.ok_or_else(|| Error::Config("physics.z0 is required".into()))?;
    let theta0 = cfg.physics.theta0;
    let eta = cfg.eta()?;
    let n = &cfg.numerics;
    let state = TwoModeState::from_imbalance(z0, theta0).map_err(|e| e.context("physics.z0"))?;
    let params = two_mode_params(&state, eta)?;
    let motion = classify_motion(&params);
    let ode = integrate_two_mode(&state, eta, n.tau_end, n.dtau)?;
    let n0 = state.norm_sqr();
    sink.csv(
        "twomode_ode.csv",
        &TWOMODE_COLUMNS,
        ode.iter().map(|(t, s)| {
            floats(&[*t, s.b_r.re, s.b_r.im, s.b_l.re, s.b_l.im, s.imbalance(), s.norm_sqr() - n0])
        }),
    )?;
    let mut summary = TwoModeSummary {
        params,
        motion,
        critical_eta: critical_eta(z0, theta0),
        dtau: n.dtau,
        tau_end: n.tau_end,
        max_discrepancy: None,
    };
    if n.analytic {
        if params.regime == Regime::Separatrix {
            sink.json("twomode.json", &summary)?;
            return Err(Error::Separatrix { k2: params.k2 });
        }
        let analytic: Vec<(f64, f64)> = ode
            .iter()
            .map(|(t, _)| imbalance_analytic(*t, &params).map(|z| (*t, z)))
            .collect::<Result<_>>()?;
        let disc = ode
            .iter()
            .zip(&analytic)
            .map(|((_, s), (_, z))| (s.imbalance() - z).abs())
            .fold(0.0, f64::max);
        summary.max_discrepancy = Some(disc);
        sink.csv("twomode_analytic.csv", &["tau", "z"], analytic.iter().map(|(t, z)| floats(&[*t, *z])))?;
    }
    sink.json("twomode.json", &summary)
}

#[derive(Serialize)]
struct StabilityOutput<'a> {
    config: &'a StabilityConfig,
    #[serde(flatten)]
    report: &'a StabilityReport,
}

/// The stability configuration described by a run config.
pub fn stability_config(cfg: &RunConfig) -> Result<StabilityConfig> {
    if cfg.physics.epsilon.is_some() {
        return Err(Error::Config("stability holds eta fixed; give physics.eta".into()));
    }
    let n = &cfg.numerics;
    let mut s = StabilityConfig::new(cfg.potential_spec()?, n.half_width, n.n_points, cfg.hbars()?, cfg.eta()?);
    s.mass = cfg.physics.m;
    s.tau_prime = cfg.tau_prime()?;
    s.dtau = n.dtau;
    s.psi0 = cfg.physics.psi0;
    s.continuum_modes = n.continuum_modes;
    s.stride = n.stride;
    Ok(s)
}

fn cmd_stability(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let scfg = stability_config(cfg)?;
    let report = crate::gpe::stability_experiment(&scfg)?;
    sink.json("stability.json", &StabilityOutput { config: &scfg, report: &report })?;
    for (row, traj) in report.rows.iter().zip(&report.trajectories) {
        let name = format!("trajectory_hbar_{}.csv", row.hbar);
        sink.csv(&name, &TRAJECTORY_COLUMNS, trajectory_rows(&traj.samples))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub z0: f64,
    pub theta0: f64,
    pub eta: f64,
    pub k2: f64,
    pub regime: Regime,
    pub min_z: f64,
    pub max_z: f64,
}

/// One regime-map point; `z` extrema come from the integrated trajectory.
pub fn regime_row(z0: f64, theta0: f64, eta: f64, tau_end: f64, dtau: f64) -> Result<RegimeRow> {
    let state = TwoModeState::from_imbalance(z0, theta0)?;
    let p = two_mode_params(&state, eta)?;
    let traj = integrate_two_mode(&state, eta, tau_end, dtau.min(max_step(eta)))?;
    let (min_z, max_z) = traj
        .iter()
        .map(|(_, s)| s.imbalance())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z), hi.max(z)));
    Ok(RegimeRow { z0, theta0, eta, k2: p.k2, regime: p.regime, min_z, max_z })
}

fn cmd_sweep(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let sweep = cfg.sweep.clone().unwrap_or(SweepBlock { z0: None, theta0: None, eta: None });
    let z0s = match sweep.z0 {
        Some(v) => v,
        None => vec![cfg.physics.z0.ok_or_else(|| Error::Config("sweep needs z0 values".into()))?],
    };
    let thetas = sweep.theta0.unwrap_or_else(|| vec![cfg.physics.theta0]);
    let etas = match sweep.eta {
        Some(v) => v,
        None => vec![cfg.eta().map_err(|_| Error::Config("sweep needs eta values".into()))?],
    };
    let mut points = Vec::with_capacity(z0s.len() * thetas.len() * etas.len());
    for &z in &z0s {
        for &t in &thetas {
            points.extend(etas.iter().map(|&e| (z, t, e)));
        }
    }
    let n = &cfg.numerics;
    let rows: Vec<RegimeRow> = points
        .par_iter()
        .map(|&(z, t, e)| regime_row(z, t, e, n.tau_end, n.dtau).map_err(|err| Error::Config(err.to_string())))
        .collect::<Result<_>>()?;
    sink.csv(
        "regime_map.csv",
        &["z0", "theta0", "eta", "k2", "regime", "min_z", "max_z"],
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.z0),
                fmt_f64(r.theta0),
                fmt_f64(r.eta),
                fmt_f64(r.k2),
                r.regime.to_string(),
                fmt_f64(r.min_z),
                fmt_f64(r.max_z),
            ]
        }),
    )?;
    sink.json("regime_map.json", &rows)
}

/// Parses `args`, applies the thread override and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (command, run) = match Cli::try_parse_from(args) {
        Ok(cli) => cli.command.split(),
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = thread_pool().and_then(|pool| {
        let cfg = RunConfig::from_path(&run.config)?;
        pool.install(|| execute(command, &cfg, run.out.as_deref()))
    });
    match result {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("dwlab: {e}");
            e.exit_code()
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

