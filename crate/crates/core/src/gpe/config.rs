use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ObservableX;
use crate::spectral::DoubletBasis;

/// Default cap on `|eps| c / omega`.
pub const DEFAULT_ETA_MAX: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exponential integrator in the eigenbasis of the linear Hamiltonian,
    /// advanced in slow time. Handles splittings far below f64 resolution of
    /// the eigenvalues.
    #[default]
    Spectral,
    /// Strang splitting with the kinetic step in Fourier space.
    SplitStep,
    /// Crank-Nicolson with a predictor-corrector for the nonlinearity.
    CrankNicolson,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Method::Spectral),
            "split-step" => Ok(Method::SplitStep),
            "crank-nicolson" => Ok(Method::CrankNicolson),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Everything one propagation needs.
///
/// Times are physical (`t`); the spectral method converts to slow time
/// `tau = omega t / hbar` internally.
#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub basis: Arc<DoubletBasis>,
    pub epsilon: f64,
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    /// Steps between stored samples.
    pub stride: usize,
    pub eta_max: f64,
    /// Largest accepted `|eps|` for `eps < 0`.
    pub attractive_cap: f64,
    /// Propagate `(H0 - Omega)` (true) or `H0` (false).
    pub rotating_frame: bool,
    /// Accept initial states with a component outside the doublet span.
    pub allow_general_initial: bool,
    /// Continuum eigenvectors kept per parity sector by the spectral method.
    pub continuum_modes: usize,
    pub observable: ObservableX,
}

impl EvolutionConfig {
    /// One beating period with `dt = T / 20000`, about 1000 samples.
    pub fn new(basis: Arc<DoubletBasis>, epsilon: f64) -> Self {
        let period = basis.beating_period();
        let observable = ObservableX::position(*basis.grid());
        let cap = DEFAULT_ETA_MAX * basis.omega / basis.c;
        Self {
            basis,
            epsilon,
            t_end: period,
            dt: period / 20000.0,
            method: Method::default(),
            stride: 20,
            eta_max: DEFAULT_ETA_MAX,
            attractive_cap: cap,
            rotating_frame: true,
            allow_general_initial: false,
            continuum_modes: 64,
            observable,
        }
    }

    /// Config at fixed `eta = eps c / omega`.
    pub fn with_eta(basis: Arc<DoubletBasis>, eta: f64) -> Self {
        let eps = eta * basis.omega / basis.c;
        Self::new(basis, eps)
    }

    pub fn hbar(&self) -> f64 {
        self.basis.hbar()
    }

    pub fn mass(&self) -> f64 {
        self.basis.mass()
    }

    /// `eps c / omega`.
    pub fn eta(&self) -> f64 {
        self.epsilon * self.basis.c / self.basis.omega
    }

    /// Slow-time step `omega dt / hbar`.
    pub fn dtau(&self) -> f64 {
        self.basis.omega * self.dt / self.hbar()
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be >= 1".into()));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::Config("epsilon must be finite".into()));
        }
        if self.eta().abs() > self.eta_max {
            return Err(Error::Config(format!(
                "|eta| = {} exceeds the cap {}",
                self.eta().abs(),
                self.eta_max
            )));
        }
        if self.epsilon < 0.0 && -self.epsilon > self.attractive_cap {
            return Err(Error::Config(format!(
                "attractive epsilon {} exceeds the cap {}",
                self.epsilon, self.attractive_cap
            )));
        }
        if self.observable.grid() != self.basis.grid() {
            return Err(Error::GridMismatch("observable and basis grids differ".into()));
        }
        Ok(())
    }
}
