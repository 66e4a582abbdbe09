//! Symmetric tridiagonal eigenvalues by Sturm-count bisection and eigenvectors
//! by shifted inverse iteration, generic over the working precision.

use num_traits::Float;
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Working precision of the solver: a [`Float`] with an accurate quotient and
/// its unit roundoff.
pub trait Scalar: Float {
    /// Unit roundoff of the working precision.
    fn roundoff() -> Self;

    fn quot(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl Scalar for f64 {
    fn roundoff() -> Self {
        f64::EPSILON
    }
}

impl Scalar for TwoFloat {
    // `TwoFloat::EPSILON` is the smallest normal f64, not the roundoff.
    fn roundoff() -> Self {
        TwoFloat::from(2f64.powi(-104))
    }

    // The library quotient is only f64-accurate; one residual correction
    // restores double-double accuracy.
    fn quot(self, rhs: Self) -> Self {
        let q = self / rhs;
        q + (self - q * rhs) / rhs.hi()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag<F> {
    /// Diagonal entries.
    pub diag: Vec<F>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<F>,
}

impl<F: Scalar> SymTridiag<F> {
    pub fn new(diag: Vec<F>, off: Vec<F>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (F, F) {
        let n = self.len();
        let mut lo = F::infinity();
        let mut hi = F::neg_infinity();
        for i in 0..n {
            let mut r = F::zero();
            if i > 0 {
                r = r + self.off[i - 1].abs();
            }
            if i + 1 < n {
                r = r + self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> F {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: F) -> usize {
        let pivmin = F::min_positive_value().sqrt() * self.norm_inf().max(F::one());
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                let b = self.off[i - 1];
                q = (self.diag[i] - x) - (b * b).quot(q);
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < F::zero() {
                count += 1;
            }
        }
        count
    }

    /// `k`-th smallest eigenvalue (0-based), bisected until the bracket stops shrinking.
    pub fn eigenvalue(&self, k: usize) -> Result<F> {
        if k >= self.len() {
            return Err(Error::Domain(format!("eigenvalue index {k} out of range {}", self.len())));
        }
        let (glo, ghi) = self.gershgorin();
        let pad = self.norm_inf().max(F::one()) * F::roundoff();
        let mut lo = glo - pad;
        let mut hi = ghi + pad;
        let two = F::one() + F::one();
        for _ in 0..400 {
            let mid = (lo + hi).quot(two);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lambda = (lo + hi).quot(two);
        if !lambda.is_finite() {
            return Err(Error::Solver {
                message: format!("bisection for eigenvalue {k} produced a non-finite value"),
                residuals: vec![],
            });
        }
        Ok(lambda)
    }

    /// Solves `(T - sigma) x = rhs` by unpivoted LDL^T elimination.
    fn shifted_solve(&self, sigma: F, rhs: &[F]) -> Vec<F> {
        let n = self.len();
        let tiny = F::roundoff() * self.norm_inf().max(F::one());
        let mut d = vec![F::zero(); n];
        let mut y = rhs.to_vec();
        d[0] = self.diag[0] - sigma;
        for i in 1..n {
            if d[i - 1].abs() < tiny {
                d[i - 1] = tiny;
            }
            let l = self.off[i - 1].quot(d[i - 1]);
            d[i] = (self.diag[i] - sigma) - l * self.off[i - 1];
            y[i] = y[i] - l * y[i - 1];
        }
        if d[n - 1].abs() < tiny {
            d[n - 1] = tiny;
        }
        let mut x = vec![F::zero(); n];
        x[n - 1] = y[n - 1].quot(d[n - 1]);
        for i in (0..n - 1).rev() {
            x[i] = (y[i] - self.off[i] * x[i + 1]).quot(d[i]);
        }
        x
    }

    /// Unit eigenvector for the eigenvalue closest to `sigma`, by `iterations`
    /// rounds of inverse iteration from a constant start.
    pub fn inverse_iteration(&self, sigma: F, iterations: usize) -> Vec<F> {
        let n = self.len();
        let mut x = vec![F::one(); n];
        for _ in 0..iterations.max(1) {
            x = self.shifted_solve(sigma, &x);
            let norm = x.iter().fold(F::zero(), |s, &v| s + v * v).sqrt();
            for v in &mut x {
                *v = v.quot(norm);
            }
        }
        x
    }

    /// `||T x - lambda x||_2` in the working precision.
    pub fn residual(&self, x: &[F], lambda: F) -> F {
        let n = self.len();
        let mut s = F::zero();
        for i in 0..n {
            let mut r = (self.diag[i] - lambda) * x[i];
            if i > 0 {
                r = r + self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                r = r + self.off[i] * x[i + 1];
            }
            s = s + r * r;
        }
        s.sqrt()
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(F) -> G) -> SymTridiag<G> {
        SymTridiag {
            diag: self.diag.iter().map(|&v| f(v)).collect(),
            off: self.off.iter().map(|&v| f(v)).collect(),
        }
    }
}
