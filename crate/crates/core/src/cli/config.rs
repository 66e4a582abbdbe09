use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpe::{InitialState, Method};
use crate::grid::Grid1D;
use crate::spectral::PotentialSpec;

/// One JSON document per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialBlock,
    #[serde(default)]
    pub physics: PhysicsBlock,
    #[serde(default)]
    pub numerics: NumericsBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialBlock {
    Quartic {
        #[serde(rename = "V0", alias = "v0")]
        v0: f64,
        a: f64,
    },
    /// Two-column `x,V` CSV; relative paths resolve against the config file.
    Table { path: PathBuf },
}

/// A single `hbar` or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HbarSpec {
    One(f64),
    Many(Vec<f64>),
}

impl HbarSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            HbarSpec::One(h) => vec![*h],
            HbarSpec::Many(v) => v.clone(),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<HbarSpec>,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_prime: Option<f64>,
    #[serde(default)]
    pub psi0: InitialState,
    /// Initial imbalance of the two-mode commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    #[serde(default)]
    pub theta0: f64,
}

impl Default for PhysicsBlock {
    fn default() -> Self {
        Self {
            hbar: None,
            m: 1.0,
            epsilon: None,
            eta: None,
            tau_prime: None,
            psi0: InitialState::default(),
            z0: None,
            theta0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsBlock {
    /// Half-width of the domain `[-L, L)`.
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n_points: usize,
    /// Time step; defaults to a fraction of the beating period.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Final time; defaults to one beating period.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    pub method: Method,
    pub stride: usize,
    /// Slow-time step of the two-mode integrator and of the stability runs.
    pub dtau: f64,
    /// Slow-time horizon of `twomode` and `sweep`.
    pub tau_end: f64,
    pub continuum_modes: usize,
    pub rotating_frame: bool,
    pub allow_general_initial: bool,
    /// `twomode`: evaluate the closed form (refused at the separatrix).
    pub analytic: bool,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        Self {
            half_width: 3.0,
            n_points: 1024,
            dt: None,
            t_end: None,
            method: Method::default(),
            stride: 20,
            dtau: 1e-3,
            tau_end: 20.0,
            continuum_modes: 64,
            rotating_frame: true,
            allow_general_initial: false,
            analytic: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: None, formats: vec![Format::Csv, Format::Json] }
    }
}

impl OutputBlock {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// Regime-map grid; missing axes fall back to the physics block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
}

impl RunConfig {
    /// Parses and checks a config file; table paths become absolute.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json(&text, base)
    }

    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        if let PotentialBlock::Table { path } = &mut cfg.potential {
            if path.is_relative() {
                *path = base.join(&*path);
            }
            if !path.exists() {
                return Err(Error::Config(format!("potential table {} not found", path.display())));
            }
            *path = path.canonicalize()?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let p = &self.physics;
        if p.epsilon.is_some() && p.eta.is_some() {
            return Err(Error::Config("give exactly one of epsilon and eta".into()));
        }
        if !(p.m > 0.0 && p.m.is_finite()) {
            return Err(Error::Config(format!("m must be positive, got {}", p.m)));
        }
        if let Some(h) = &p.hbar {
            if h.values().is_empty() || h.values().iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::Config("hbar values must be positive".into()));
            }
        }
        let n = &self.numerics;
        if n.stride == 0 {
            return Err(Error::Config("stride must be >= 1".into()));
        }
        if !(n.dtau > 0.0 && n.tau_end > 0.0) {
            return Err(Error::Config("dtau and tau_end must be positive".into()));
        }
        if self.output.formats.is_empty() {
            return Err(Error::Config("output.formats must not be empty".into()));
        }
        Ok(())
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec> {
        match &self.potential {
            PotentialBlock::Quartic { v0, a } => PotentialSpec::quartic(*v0, *a),
            PotentialBlock::Table { path } => PotentialSpec::from_csv(path),
        }
        .map_err(|e| match e {
            Error::Domain(m) => Error::Config(m),
            other => other,
        })
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.numerics.half_width, self.numerics.n_points).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn hbars(&self) -> Result<Vec<f64>> {
        self.physics
            .hbar
            .as_ref()
            .map(HbarSpec::values)
            .ok_or_else(|| Error::Config("physics.hbar is required".into()))
    }

    pub fn single_hbar(&self) -> Result<f64> {
        match self.hbars()?.as_slice() {
            [h] => Ok(*h),
            _ => Err(Error::Config("this command needs a single hbar".into())),
        }
    }

    pub fn eta(&self) -> Result<f64> {
        self.physics.eta.ok_or_else(|| Error::Config("physics.eta is required".into()))
    }

    pub fn tau_prime(&self) -> Result<f64> {
        self.physics.tau_prime.ok_or_else(|| Error::Config("physics.tau_prime is required".into()))
    }
}
