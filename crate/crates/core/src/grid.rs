//! Uniform symmetric grids, complex fields and the quadrature every other
//! module measures them with.
//!
//! Nodes are `x_j = -L + j*dx` for `j = 0..n`, `dx = 2L/n`, so `x = +L` is
//! identified with `x = -L` (periodic closure). The reflection `x -> -x` maps
//! node `j` to node `(n - j) mod n`; node `0` is its own mirror and node `n/2`
//! sits at the origin.
//!
//! All integrals are plain Riemann sums with weight `dx`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_width: f64,
    n_points: usize,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 64;

    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Domain(format!("half width must be positive, got {half_width}")));
        }
        if n_points < Self::MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::Domain(format!(
                "n_points must be a power of two >= {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { half_width, n_points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Index of the node at `x = 0`.
    pub fn center(&self) -> usize {
        self.n_points / 2
    }

    /// Index of the node at `-x_j`.
    pub fn mirror(&self, j: usize) -> usize {
        (self.n_points - j) % self.n_points
    }

    pub(crate) fn ensure_same(&self, other: &Grid1D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(L = {}, n = {}) vs (L = {}, n = {})",
                self.half_width, self.n_points, other.half_width, other.n_points
            )))
        }
    }
}

/// Complex samples of a field on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain(format!("non-finite sample at node {j}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `psi(x) -> psi(-x)`.
    pub fn reflect(&self) -> Self {
        let values = (0..self.grid.len()).map(|j| self.values[self.grid.mirror(j)]).collect();
        Self { grid: self.grid, values }
    }

    pub fn norm(&self) -> f64 {
        l2_norm(self)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Domain("cannot normalize the zero field".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex64, other: &Wavefunction) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + s * b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn densities(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

fn l2_norm(f: &Wavefunction) -> f64 {
    (f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid.dx()).sqrt()
}

/// `(sum |f_j|^p dx)^(1/p)`, or `max |f_j|` for `p = inf`.
pub fn lp_norm(f: &Wavefunction, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    if p == 2.0 {
        return Ok(l2_norm(f));
    }
    let s: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    Ok((s * f.grid.dx()).powf(1.0 / p))
}

/// `<f, g> = sum conj(f_j) g_j dx`.
pub fn inner_product(f: &Wavefunction, g: &Wavefunction) -> Result<Complex64> {
    f.grid.ensure_same(&g.grid)?;
    let s: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum();
    Ok(s * f.grid.dx())
}

/// Real `<f, g>` for real sample vectors on the same grid.
pub(crate) fn dot_real(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dx
}

/// Bounded odd weight `X(x)` used for the center-of-mass observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableX {
    grid: Grid1D,
    values: Vec<f64>,
}

impl ObservableX {
    /// Certifies `X(-x) = -X(x)` exactly on every node.
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch("observable length differs from grid".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("observable samples must be finite".into()));
        }
        for j in 0..grid.len() {
            let m = grid.mirror(j);
            if values[m] != -values[j] {
                return Err(Error::Domain(format!(
                    "observable is not odd at node {j}: X = {}, X(mirror) = {}",
                    values[j], values[m]
                )));
            }
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on the positive half and mirrors it, so oddness is exact.
    /// The self-mirrored endpoint and the origin get `X = 0`.
    pub fn from_odd_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = grid.len();
        let c = grid.center();
        let mut values = vec![0.0; n];
        for j in (c + 1)..n {
            let v = f(grid.x(j));
            values[j] = v;
            values[grid.mirror(j)] = -v;
        }
        Self::new(grid, values)
    }

    /// `X(x) = x` (with `X = 0` on the periodic endpoint).
    pub fn position(grid: Grid1D) -> Self {
        Self::from_odd_fn(grid, |x| x).expect("position observable is odd by construction")
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `<X psi, psi> = integral of X(x) |psi(x)|^2`.
pub fn center_of_mass(psi: &Wavefunction, x: &ObservableX) -> Result<f64> {
    psi.grid.ensure_same(&x.grid)?;
    let s: Complex64 =
        psi.values.iter().zip(&x.values).map(|(p, w)| p.conj() * (p * *w)).sum::<Complex64>()
            * psi.grid.dx();
    let scale = x.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    debug_assert!(s.im.abs() < 1e-12 * scale, "imaginary part {} in <X psi, psi>", s.im);
    Ok(s.re)
}
