use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// A symmetric double-well potential: built-in quartic or a tabulated profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// `V(x) = v0 ((x/a)^2 - 1)^2`.
    Quartic { v0: f64, a: f64 },
    /// Piecewise-linear interpolation of `(x, V)` samples, constant beyond the ends.
    Tabulated { x: Vec<f64>, v: Vec<f64> },
}

impl PotentialSpec {
    pub fn quartic(v0: f64, a: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite() && a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("quartic needs V0 > 0 and a > 0, got {v0}, {a}")));
        }
        Ok(PotentialSpec::Quartic { v0, a })
    }

    pub fn tabulated(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() != v.len() || x.len() < 3 {
            return Err(Error::Domain("a potential table needs >= 3 (x, V) rows".into()));
        }
        if x.iter().chain(&v).any(|s| !s.is_finite()) {
            return Err(Error::Domain("potential table contains non-finite samples".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("potential table x column must be strictly increasing".into()));
        }
        Ok(PotentialSpec::Tabulated { x, v })
    }

    /// Reads a two-column `x,V` CSV. Blank lines, `#` comments and one
    /// non-numeric header line are skipped.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match cols.as_slice() {
                [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some((x, v)) => {
                    xs.push(x);
                    vs.push(v);
                }
                None if xs.is_empty() && lineno == 0 => continue,
                None => {
                    return Err(Error::Config(format!(
                        "{}:{}: expected two numeric columns `x,V`",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Self::tabulated(xs, vs)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Quartic { v0, a } => {
                let s = (x / a) * (x / a) - 1.0;
                v0 * s * s
            }
            PotentialSpec::Tabulated { x: xs, v } => {
                let n = xs.len();
                if x <= xs[0] {
                    return v[0];
                }
                if x >= xs[n - 1] {
                    return v[n - 1];
                }
                let j = xs.partition_point(|&p| p <= x) - 1;
                let t = (x - xs[j]) / (xs[j + 1] - xs[j]);
                v[j] + t * (v[j + 1] - v[j])
            }
        }
    }

    pub fn samples(&self, grid: &Grid1D) -> Vec<f64> {
        grid.nodes().into_iter().map(|x| self.eval(x)).collect()
    }

    /// Global minimum value.
    pub fn v_min(&self) -> f64 {
        match self {
            PotentialSpec::Quartic { .. } => 0.0,
            PotentialSpec::Tabulated { v, .. } => v.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Position of the right minimum.
    pub fn well_position(&self) -> f64 {
        match self {
            PotentialSpec::Quartic { a, .. } => *a,
            PotentialSpec::Tabulated { x, v } => {
                let vmin = self.v_min();
                x.iter()
                    .zip(v)
                    .filter(|(&xi, &vi)| xi > 0.0 && vi == vmin)
                    .map(|(&xi, _)| xi)
                    .next()
                    .unwrap_or(f64::NAN)
            }
        }
    }

    /// Limit of `V` at large `|x|` (`+inf` for the quartic).
    pub fn v_inf(&self) -> f64 {
        match self {
            PotentialSpec::Quartic { .. } => f64::INFINITY,
            PotentialSpec::Tabulated { v, .. } => v[0].min(v[v.len() - 1]),
        }
    }

    /// `V(0) - V_min`.
    pub fn barrier_height(&self) -> f64 {
        self.eval(0.0) - self.v_min()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    /// Node positions of the global minima found on the grid.
    pub minima: Vec<f64>,
    /// Second differences of `V` at those minima.
    pub second_derivatives: Vec<f64>,
    pub symmetry_defect: f64,
    pub v_min: f64,
    pub v_inf: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `Err(Validation)` naming every failed check.
    pub fn require(&self) -> Result<()> {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} check failed ({})", c.name, c.detail))
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(failed.join("; ")))
        }
    }
}

/// Checks the double-well conditions on the grid nodes: finiteness, mirror
/// symmetry, exactly two non-degenerate global minima at `+-a`, and a
/// confining rise above `V_min` for `|x| >= 2a`.
pub fn validate_potential(spec: &PotentialSpec, grid: &Grid1D) -> ValidationReport {
    let v = spec.samples(grid);
    let n = grid.len();
    let dx = grid.dx();
    let scale = v.iter().fold(1.0f64, |m, s| m.max(s.abs()));
    let mut checks = Vec::new();

    let finite = v.iter().all(|s| s.is_finite());
    checks.push(CheckResult {
        name: "finite".into(),
        passed: finite,
        measured: if finite { 0.0 } else { 1.0 },
        detail: "all samples finite and bounded below".into(),
    });

    let symmetry_defect = (1..n).map(|j| (v[j] - v[grid.mirror(j)]).abs()).fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "symmetry".into(),
        passed: symmetry_defect <= 1e-12 * scale,
        measured: symmetry_defect,
        detail: format!("max |V(x) - V(-x)| = {symmetry_defect:e}"),
    });

    let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * scale;
    let mut minima = Vec::new();
    let mut second = Vec::new();
    for j in 1..n - 1 {
        if v[j] <= v[j - 1] && v[j] <= v[j + 1] && v[j] - vmin <= tol {
            minima.push(grid.x(j));
            second.push((v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dx * dx));
        }
    }
    let two = minima.len() == 2
        && (minima[0] + minima[1]).abs() <= 2.0 * dx
        && minima[1] > 0.0
        && second.iter().all(|&d| d > 0.0);
    checks.push(CheckResult {
        name: "two-minima".into(),
        passed: two,
        measured: minima.len() as f64,
        detail: format!(
            "expected two mirrored non-degenerate global minima, found {} at {:?}",
            minima.len(),
            minima
        ),
    });

    let a = minima.last().copied().filter(|&m| m > 0.0).unwrap_or(spec.well_position());
    let reach = (2.0 * a).min(0.9 * grid.half_width());
    let outer = (0..n)
        .filter(|&j| grid.x(j).abs() >= reach)
        .map(|j| v[j])
        .fold(f64::INFINITY, f64::min);
    checks.push(CheckResult {
        name: "confinement".into(),
        passed: a.is_finite() && outer > vmin + tol,
        measured: outer - vmin,
        detail: format!("min V over |x| >= {reach:.3} exceeds V_min by {:e}", outer - vmin),
    });

    ValidationReport {
        checks,
        minima,
        second_derivatives: second,
        symmetry_defect,
        v_min: vmin,
        v_inf: spec.v_inf(),
    }
}
