//! Two-mode reduction in slow time `tau`:
//!
//! ```text
//! b_R' = i b_L - i eta |b_R|^2 b_R
//! b_L' = i b_R - i eta |b_L|^2 b_L
//! ```
//!
//! with imbalance `z = |b_R|^2 - |b_L|^2`, its closed-form elliptic solution,
//! regime classification and the critical nonlinearity.
//!
//! The closed form is written in terms of
//!
//! ```text
//! I   = sqrt(1 - z0^2) cos(theta0) - eta z0^2 / 4
//! S   = sqrt(eta^2/4 + 1 + I eta)
//! A   = (2 sqrt 2 / |eta|) sqrt(S - (1 + I eta/2))
//! k^2 = (1 - (1 + I eta/2) / S) / 2
//! ```
//!
//! `z = A cn(A|eta|(tau - tau0)/(2k), k)` for `k < 1` and
//! `z = sign(z0) A dn(A|eta|(tau - tau0)/2, 1/k)` for `k > 1`.
//! The magnitude `|eta|` appears because `z(eta, theta0) = z(-eta, theta0 + pi)`;
//! for `eta > 0` the formulas coincide with the signed ones.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_k, jacobi};
use crate::error::{Error, Result};

/// Band around `k^2 = 1` classified as the separatrix.
pub const SEPARATRIX_TOL: f64 = 1e-9;

const NORM_TOL: f64 = 1e-10;
const SMALL_ETA: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeState {
    pub b_r: Complex64,
    pub b_l: Complex64,
}

impl TwoModeState {
    pub fn new(b_r: Complex64, b_l: Complex64) -> Self {
        Self { b_r, b_l }
    }

    /// State with imbalance `z0` and relative phase `arg b_R - arg b_L = theta0`.
    pub fn from_imbalance(z0: f64, theta0: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&z0) {
            return Err(Error::Domain(format!("imbalance must lie in [-1, 1], got {z0}")));
        }
        let r = (0.5 * (1.0 + z0)).sqrt();
        let l = (0.5 * (1.0 - z0)).sqrt();
        Ok(Self { b_r: Complex64::from_polar(r, theta0), b_l: Complex64::new(l, 0.0) })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.b_r.norm_sqr() + self.b_l.norm_sqr()
    }

    pub fn imbalance(&self) -> f64 {
        self.b_r.norm_sqr() - self.b_l.norm_sqr()
    }

    pub fn relative_phase(&self) -> f64 {
        (self.b_r * self.b_l.conj()).arg()
    }

    /// `dz/dtau` implied by the equations of motion.
    pub fn imbalance_rate(&self) -> f64 {
        -4.0 * (self.b_r.conj() * self.b_l).im
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Beating,
    SelfTrapped,
    Separatrix,
}

impl Regime {
    pub fn from_k2(k2: f64) -> Self {
        if k2 < 1.0 - SEPARATRIX_TOL {
            Regime::Beating
        } else if k2 > 1.0 + SEPARATRIX_TOL {
            Regime::SelfTrapped
        } else {
            Regime::Separatrix
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Beating => "Beating",
            Regime::SelfTrapped => "SelfTrapped",
            Regime::Separatrix => "Separatrix",
        };
        f.write_str(s)
    }
}

/// Closed-form data of one two-mode orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeParams {
    pub eta: f64,
    pub z0: f64,
    pub theta0: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub k2: f64,
    pub tau0: f64,
    pub regime: Regime,
}

impl TwoModeParams {
    /// Angular rate of the elliptic argument: `A|eta|/(2k)` on the cn branch,
    /// `A|eta|/2` on the dn branch, `2` at `eta = 0`.
    pub fn rate(&self) -> f64 {
        let s = s_of(self.eta, self.i);
        match self.regime {
            // A|eta|/(2k) = 2 sqrt(S), finite as k -> 0.
            Regime::Beating => 2.0 * s.sqrt(),
            Regime::SelfTrapped => self.a * self.eta.abs() / 2.0,
            Regime::Separatrix => f64::NAN,
        }
    }

    /// Modulus passed to the Jacobi functions.
    pub fn elliptic_modulus(&self) -> f64 {
        match self.regime {
            Regime::Beating => self.k2.max(0.0).sqrt(),
            Regime::SelfTrapped => 1.0 / self.k2.sqrt(),
            Regime::Separatrix => 1.0,
        }
    }
}

fn i_of(z0: f64, theta0: f64, eta: f64) -> f64 {
    ((1.0 - z0) * (1.0 + z0)).max(0.0).sqrt() * theta0.cos() - eta * z0 * z0 / 4.0
}

fn s_of(eta: f64, i: f64) -> f64 {
    (eta * eta / 4.0 + 1.0 + i * eta).max(0.0).sqrt()
}

/// `(A, k^2)` from `(I, eta)`.
///
/// Uses `S^2 - P^2 = eta^2 (1 - I^2) / 4` with `P = 1 + I eta / 2` to avoid
/// the `0/0` of the radical form when `P > 0`.
fn amplitude_and_modulus(i: f64, eta: f64) -> Result<(f64, f64)> {
    let s = s_of(eta, i);
    let p = 1.0 + i * eta / 2.0;
    let one_minus_i2 = (1.0 - i) * (1.0 + i);
    if eta.abs() < SMALL_ETA {
        // eta -> 0 limit: A^2 = 1 - I^2, k^2 = eta^2 (1 - I^2) / 16.
        let a2 = 2.0 * one_minus_i2 / (s + p);
        let k2 = eta * eta * one_minus_i2 / (8.0 * s * (s + p));
        return finish(a2, k2);
    }
    let radicand = s - p;
    if radicand < -1e-12 {
        return Err(Error::Consistency(format!(
            "negative amplitude radicand {radicand:e} (I = {i}, eta = {eta})"
        )));
    }
    if p > 0.0 {
        let a2 = 2.0 * one_minus_i2 / (s + p);
        let k2 = eta * eta * one_minus_i2 / (8.0 * s * (s + p));
        finish(a2, k2)
    } else {
        let a2 = 8.0 / (eta * eta) * radicand.max(0.0);
        let k2 = 0.5 * (1.0 - p / s);
        finish(a2, k2)
    }
}

fn finish(a2: f64, k2: f64) -> Result<(f64, f64)> {
    if a2 < -1e-12 {
        return Err(Error::Consistency(format!("negative squared amplitude {a2:e}")));
    }
    Ok((a2.max(0.0).sqrt(), k2.max(0.0)))
}

/// `k^2` as a function of `eta` for a fixed initial condition.
pub fn modulus_squared(z0: f64, theta0: f64, eta: f64) -> f64 {
    let i = i_of(z0, theta0, eta);
    amplitude_and_modulus(i, eta).map(|(_, k2)| k2).unwrap_or(f64::NAN)
}

/// Closed-form orbit data for `state0` at nonlinearity `eta`.
pub fn two_mode_params(state0: &TwoModeState, eta: f64) -> Result<TwoModeParams> {
    if !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be finite, got {eta}")));
    }
    let n = state0.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::Domain(format!("two-mode state not normalized: |b|^2 = {n}")));
    }
    let z0 = state0.imbalance().clamp(-1.0, 1.0);
    let theta0 = state0.relative_phase();
    let i = i_of(z0, theta0, eta);
    let (a, k2) = amplitude_and_modulus(i, eta)?;
    let regime = Regime::from_k2(k2);
    let mut params = TwoModeParams { eta, z0, theta0, i, a, k2, tau0: 0.0, regime };
    params.tau0 = match regime {
        Regime::Separatrix => f64::NAN,
        _ => phase_offset(&params, state0.imbalance_rate())?,
    };
    Ok(params)
}

/// Largest `u` bracket search for `am(u, k) = phi` on a monotone branch.
fn invert_amplitude(phi: f64, k: f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if jacobi(mid, k)?.amplitude() < phi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `tau0` such that the closed form starts at `z0` moving with `dz/dtau = rate0`.
fn phase_offset(p: &TwoModeParams, rate0: f64) -> Result<f64> {
    if p.a == 0.0 {
        return Ok(0.0);
    }
    let lambda = p.rate();
    let k = p.elliptic_modulus();
    match p.regime {
        Regime::Beating => {
            // cn(u0) = z0 / A; sn dn = rate0 / (A lambda) fixes sin(am) near the turning points.
            let c = (p.z0 / p.a).clamp(-1.0, 1.0);
            let q = rate0 / (p.a * lambda);
            let s_mag = if c.abs() > 0.7 {
                let k2 = k * k;
                let disc = (1.0 - 4.0 * k2 * q * q).max(0.0).sqrt();
                (2.0 * q * q / (1.0 + disc)).sqrt().min(1.0)
            } else {
                ((1.0 - c) * (1.0 + c)).sqrt()
            };
            let phi = s_mag.atan2(c);
            let kk = complete_k(k)?;
            let u0 = invert_amplitude(phi, k, 0.0, 2.0 * kk)?;
            let u0 = if rate0 < 0.0 { -u0 } else { u0 };
            // z(0) = A cn(-lambda tau0) with sn(lambda tau0) carrying the sign of z'(0).
            Ok(u0 / lambda)
        }
        Regime::SelfTrapped => {
            // dn(u0) = |z0| / A; sn cn = s rate0 / (A mu m^2) with m = 1/k.
            let s = if p.z0 >= 0.0 { 1.0 } else { -1.0 };
            let m2 = k * k;
            let d = (p.z0.abs() / p.a).min(1.0);
            let q = s * rate0 / (p.a * lambda * m2);
            let cos2 = 1.0 - 2.0 * (1.0 - d) * (1.0 + d) / m2;
            let two_phi = (2.0 * q.abs()).atan2(cos2.clamp(-1.0, 1.0));
            let kk = complete_k(k)?;
            let u0 = invert_amplitude(0.5 * two_phi, k, 0.0, kk)?;
            Ok(if q < 0.0 { -u0 / lambda } else { u0 / lambda })
        }
        Regime::Separatrix => Ok(f64::NAN),
    }
}

/// Closed-form imbalance `z(tau)`.
pub fn imbalance_analytic(tau: f64, p: &TwoModeParams) -> Result<f64> {
    match p.regime {
        Regime::Separatrix => Err(Error::Separatrix { k2: p.k2 }),
        Regime::Beating => {
            if p.eta == 0.0 {
                return Ok(p.a * (2.0 * (tau - p.tau0)).cos());
            }
            let t = jacobi(p.rate() * (tau - p.tau0), p.elliptic_modulus())?;
            Ok(p.a * t.cn)
        }
        Regime::SelfTrapped => {
            let s = if p.z0 >= 0.0 { 1.0 } else { -1.0 };
            let t = jacobi(p.rate() * (tau - p.tau0), p.elliptic_modulus())?;
            Ok(s * p.a * t.dn)
        }
    }
}

/// Regime together with the quantities that decide it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionReport {
    pub regime: Regime,
    pub k2: f64,
    #[serde(rename = "A")]
    pub a: f64,
    /// Period of `z(tau)` on the beating branch; `None` otherwise.
    pub period: Option<f64>,
}

pub fn classify_motion(p: &TwoModeParams) -> MotionReport {
    let regime = Regime::from_k2(p.k2);
    let period = match regime {
        Regime::Beating => {
            complete_k(p.k2.max(0.0).sqrt()).ok().map(|kk| 4.0 * kk / p.rate())
        }
        _ => None,
    };
    MotionReport { regime, k2: p.k2, a: p.a, period }
}

/// Right-hand side of the slow-time equations.
#[inline]
pub fn two_mode_rhs(s: &TwoModeState, eta: f64) -> TwoModeState {
    let i = Complex64::i();
    TwoModeState {
        b_r: i * s.b_l - i * eta * s.b_r.norm_sqr() * s.b_r,
        b_l: i * s.b_r - i * eta * s.b_l.norm_sqr() * s.b_l,
    }
}

/// Stage states of one classical RK4 step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rk4Stages {
    pub states: [TwoModeState; 4],
    pub next: TwoModeState,
}

fn add(a: &TwoModeState, h: f64, k: &TwoModeState) -> TwoModeState {
    TwoModeState { b_r: a.b_r + k.b_r * h, b_l: a.b_l + k.b_l * h }
}

pub(crate) fn rk4_stages(s: &TwoModeState, eta: f64, h: f64) -> Rk4Stages {
    let s1 = *s;
    let k1 = two_mode_rhs(&s1, eta);
    let s2 = add(s, 0.5 * h, &k1);
    let k2 = two_mode_rhs(&s2, eta);
    let s3 = add(s, 0.5 * h, &k2);
    let k3 = two_mode_rhs(&s3, eta);
    let s4 = add(s, h, &k3);
    let k4 = two_mode_rhs(&s4, eta);
    let w = h / 6.0;
    let next = TwoModeState {
        b_r: s.b_r + (k1.b_r + 2.0 * k2.b_r + 2.0 * k3.b_r + k4.b_r) * w,
        b_l: s.b_l + (k1.b_l + 2.0 * k2.b_l + 2.0 * k3.b_l + k4.b_l) * w,
    };
    Rk4Stages { states: [s1, s2, s3, s4], next }
}

/// Largest step accepted by [`integrate_two_mode`].
pub fn max_step(eta: f64) -> f64 {
    0.01 / eta.abs().max(1.0)
}

/// Fixed-step RK4 trajectory, one entry per step including the start.
/// No renormalization is applied.
pub fn integrate_two_mode(
    state0: &TwoModeState,
    eta: f64,
    tau_end: f64,
    dtau: f64,
) -> Result<Vec<(f64, TwoModeState)>> {
    if !(tau_end > 0.0 && tau_end.is_finite()) {
        return Err(Error::Usage(format!("tau_end must be positive, got {tau_end}")));
    }
    if !(dtau > 0.0) || dtau > max_step(eta) * (1.0 + 1e-12) {
        return Err(Error::Usage(format!(
            "dtau = {dtau} exceeds the limit {} for eta = {eta}",
            max_step(eta)
        )));
    }
    let steps = (tau_end / dtau - 1e-9).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = *state0;
    out.push((0.0, s));
    for n in 1..=steps {
        s = rk4_stages(&s, eta, dtau).next;
        out.push((n as f64 * dtau, s));
    }
    Ok(out)
}

/// Smallest `eta` in `(0, 1000]` with `k^2 = 1`, or `None` when `k^2 < 1` on the whole range.
pub fn critical_eta(z0: f64, theta0: f64) -> Option<f64> {
    const ETA_MAX: f64 = 1e3;
    const SCAN: usize = 100_000;
    let f = |eta: f64| modulus_squared(z0, theta0, eta) - 1.0;
    let mut prev = 0.0;
    for j in 1..=SCAN {
        let eta = ETA_MAX * j as f64 / SCAN as f64;
        if f(eta) >= -SEPARATRIX_TOL {
            let (mut lo, mut hi) = (prev, eta);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if f(mid) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = eta;
    }
    None
}
