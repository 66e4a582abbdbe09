use num_complex::Complex64;

use super::potential::{validate_potential, PotentialSpec, ValidationReport};
use super::tridiag::SymTridiag;
use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Three-point finite-difference realization of `-(hbar^2/2m) d^2/dx^2 + V`.
///
/// The matrix acts on the interior nodes `1..n` with Dirichlet closure: node
/// `0` (the identified endpoint `x = -L = +L`) is held at zero. The interior
/// block is mirror-symmetric about the center node.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    grid: Grid1D,
    hbar: f64,
    mass: f64,
    potential: Vec<f64>,
    well_position: Option<f64>,
    validation: Option<ValidationReport>,
}

/// Validates `spec` on `grid` and assembles the Hamiltonian; refuses failed potentials.
pub fn assemble_hamiltonian(
    grid: Grid1D,
    spec: &PotentialSpec,
    hbar: f64,
    m: f64,
) -> Result<DiscreteHamiltonian> {
    check_constants(hbar, m)?;
    let report = validate_potential(spec, &grid);
    report.require()?;
    Ok(DiscreteHamiltonian {
        grid,
        hbar,
        mass: m,
        potential: spec.samples(&grid),
        well_position: Some(spec.well_position()),
        validation: Some(report),
    })
}

fn check_constants(hbar: f64, m: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    Ok(())
}

impl DiscreteHamiltonian {
    /// Hamiltonian for arbitrary potential samples, without double-well validation.
    pub fn from_samples(grid: Grid1D, potential: Vec<f64>, hbar: f64, m: f64) -> Result<Self> {
        check_constants(hbar, m)?;
        if potential.len() != grid.len() {
            return Err(Error::GridMismatch("potential length differs from grid".into()));
        }
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("potential samples must be finite".into()));
        }
        Ok(Self { grid, hbar, mass: m, potential, well_position: None, validation: None })
    }

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

    pub fn well_position(&self) -> Option<f64> {
        self.well_position
    }

    /// Report of the double-well checks, when assembled from a validated spec.
    pub fn validation(&self) -> Option<&ValidationReport> {
        self.validation.as_ref()
    }

    /// Hopping amplitude `hbar^2 / (2 m dx^2)`.
    pub fn hopping(&self) -> f64 {
        let dx = self.grid.dx();
        self.hbar * self.hbar / (2.0 * self.mass * dx * dx)
    }

    /// Interior block (nodes `1..n`) as a symmetric tridiagonal matrix.
    pub fn tridiagonal(&self) -> SymTridiag<f64> {
        let n = self.grid.len();
        let t = self.hopping();
        let diag = (1..n).map(|j| 2.0 * t + self.potential[j]).collect();
        SymTridiag { diag, off: vec![-t; n - 2] }
    }

    /// `H psi` with the Dirichlet closure; the output vanishes at node 0.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.len();
        let t = self.hopping();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for j in 1..n {
            let mut s = psi[j] * (2.0 * t + self.potential[j]);
            if j > 1 {
                s -= psi[j - 1] * t;
            }
            if j + 1 < n {
                s -= psi[j + 1] * t;
            }
            out[j] = s;
        }
        out
    }

    pub fn apply_real(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let t = self.hopping();
        let mut out = vec![0.0; n];
        for j in 1..n {
            let mut s = f[j] * (2.0 * t + self.potential[j]);
            if j > 1 {
                s -= f[j - 1] * t;
            }
            if j + 1 < n {
                s -= f[j + 1] * t;
            }
            out[j] = s;
        }
        out
    }
}
