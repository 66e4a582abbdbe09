use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::doublet::{lowest_doublet, overlap_sup};
use super::hamiltonian::assemble_hamiltonian;
use super::potential::PotentialSpec;
use crate::error::{Error, Result};
use crate::grid::Grid1D;

const SIMPSON_INTERVALS: usize = 1 << 15;

/// Smallest positive `x` with `V(x) = V_min + delta`.
fn well_boundary(spec: &PotentialSpec, delta: f64) -> Result<f64> {
    let vmin = spec.v_min();
    let barrier = spec.barrier_height();
    if !(delta >= 0.0) || delta >= barrier {
        return Err(Error::Domain(format!(
            "delta = {delta} must lie in [0, barrier height {barrier})"
        )));
    }
    if let PotentialSpec::Quartic { v0, a } = spec {
        return Ok(a * (1.0 - (delta / v0).sqrt()).max(0.0).sqrt());
    }
    let target = vmin + delta;
    let (mut lo, mut hi) = (0.0, spec.well_position());
    if !(hi > 0.0) {
        return Err(Error::Domain("potential has no positive minimum".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if spec.eval(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Gamma_delta = integral_{-b}^{b} sqrt(max(V - (V_min + delta), 0)) dx` by
/// composite Simpson quadrature.
///
/// This is the barrier integral without the `sqrt(2m)` kinetic factor; the
/// tunneling exponent of the discrete problem is `sqrt(2m) Gamma / hbar`.
pub fn agmon_distance(spec: &PotentialSpec, delta: f64) -> Result<f64> {
    let b = well_boundary(spec, delta)?;
    let level = spec.v_min() + delta;
    let f = |x: f64| (spec.eval(x) - level).max(0.0).sqrt();
    let n = SIMPSON_INTERVALS;
    let h = 2.0 * b / n as f64;
    let mut s = f(-b) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(-b + j as f64 * h);
    }
    Ok(s * h / 3.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingPoint {
    pub hbar: f64,
    pub omega: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap3: f64,
    pub c: f64,
    pub overlap_sup: f64,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingFit {
    pub points: Vec<SplittingPoint>,
    /// Slope of `ln omega` against `1/hbar`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual of the fit in `ln omega`.
    pub residual_rms: f64,
    pub gamma0: f64,
    /// `slope / (-sqrt(2m) Gamma_0)`.
    pub slope_ratio_mass_normalized: f64,
    /// `slope / (-Gamma_0)`.
    pub slope_ratio_bare: f64,
    /// `omega` strictly decreases along the (decreasing) `hbar` list.
    pub monotone: bool,
}

/// Least-squares line `y = slope x + intercept` with its coefficient of determination.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    (slope, intercept, 1.0 - ss_res / syy, (ss_res / n).sqrt())
}

/// Doublet data at one `hbar`; a failed solve is reported in the point, not raised.
pub fn splitting_point(spec: &PotentialSpec, grid: Grid1D, m: f64, hbar: f64) -> SplittingPoint {
    let solved = assemble_hamiltonian(grid, spec, hbar, m).and_then(|h| lowest_doublet(&h, 1));
    match solved {
        Ok(b) => SplittingPoint {
            hbar,
            omega: b.omega,
            lambda1: b.lambda1,
            lambda2: b.lambda2,
            gap3: b.gap3,
            c: b.c,
            overlap_sup: overlap_sup(&b),
            converged: true,
            error: None,
        },
        Err(e) => SplittingPoint {
            hbar,
            omega: f64::NAN,
            lambda1: f64::NAN,
            lambda2: f64::NAN,
            gap3: f64::NAN,
            c: f64::NAN,
            overlap_sup: f64::NAN,
            converged: false,
            error: Some(e.to_string()),
        },
    }
}

/// Splitting `omega(hbar)` over a decreasing list of at least four `hbar`
/// values, with an exponential fit in `1/hbar`. Points are solved in parallel
/// and reported in input order; failed points are flagged and left out of the fit.
pub fn splitting_scan(
    spec: &PotentialSpec,
    grid: Grid1D,
    m: f64,
    hbars: &[f64],
) -> Result<SplittingFit> {
    if hbars.len() < 4 {
        return Err(Error::Usage(format!("splitting scan needs >= 4 hbar values, got {}", hbars.len())));
    }
    if hbars.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Usage("hbar values must be strictly decreasing".into()));
    }
    let points: Vec<SplittingPoint> =
        hbars.par_iter().map(|&hbar| splitting_point(spec, grid, m, hbar)).collect();
    let good: Vec<&SplittingPoint> = points.iter().filter(|p| p.converged && p.omega > 0.0).collect();
    if good.len() < 2 {
        return Err(Error::Solver {
            message: "fewer than two converged splitting points".into(),
            residuals: vec![],
        });
    }
    let x: Vec<f64> = good.iter().map(|p| 1.0 / p.hbar).collect();
    let y: Vec<f64> = good.iter().map(|p| p.omega.ln()).collect();
    let (slope, intercept, r_squared, residual_rms) = linear_fit(&x, &y);
    let gamma0 = agmon_distance(spec, 0.0)?;
    let monotone = points.iter().all(|p| p.converged)
        && points.windows(2).all(|w| w[1].omega < w[0].omega);
    Ok(SplittingFit {
        slope,
        intercept,
        r_squared,
        residual_rms,
        gamma0,
        slope_ratio_mass_normalized: slope / (-(2.0 * m).sqrt() * gamma0),
        slope_ratio_bare: slope / -gamma0,
        monotone,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_barrier() {
        // V = 3 on [-1, 1], 0 on the wells up to |x| = 2, rising beyond.
        let x = vec![-3.0, -2.0, -1.0 - 1e-9, -1.0, 1.0, 1.0 + 1e-9, 2.0, 3.0];
        let v = vec![5.0, 0.0, 0.0, 3.0, 3.0, 0.0, 0.0, 5.0];
        let spec = PotentialSpec::tabulated(x, v).unwrap();
        let g = agmon_distance(&spec, 0.0).unwrap();
        assert!((g - 2.0 * 3f64.sqrt()).abs() < 1e-3, "{g}");
    }

    #[test]
    fn quartic_closed_form() {
        let spec = PotentialSpec::quartic(2.0, 1.0).unwrap();
        let g = agmon_distance(&spec, 0.0).unwrap();
        assert!((g - 2f64.sqrt() * 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn decreasing_in_delta() {
        let spec = PotentialSpec::quartic(2.0, 1.0).unwrap();
        let g: Vec<f64> =
            [0.0, 0.2, 0.4].iter().map(|d| agmon_distance(&spec, *d).unwrap()).collect();
        assert!(g[0] > g[1] && g[1] > g[2]);
        assert!(matches!(agmon_distance(&spec, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| -2.5 * v + 0.5).collect();
        let (s, i, r2, _) = linear_fit(&x, &y);
        assert!((s + 2.5).abs() < 1e-14 && (i - 0.5).abs() < 1e-13 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn scan_rejects_short_or_unsorted_lists() {
        let spec = PotentialSpec::quartic(2.0, 1.0).unwrap();
        let g = Grid1D::new(3.0, 256).unwrap();
        assert!(splitting_scan(&spec, g, 1.0, &[0.3, 0.2, 0.1]).is_err());
        assert!(splitting_scan(&spec, g, 1.0, &[0.3, 0.2, 0.25, 0.1]).is_err());
    }
}
