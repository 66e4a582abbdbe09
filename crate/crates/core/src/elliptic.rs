//! Jacobi elliptic functions and the complete elliptic integral of the first
//! kind, modulus convention (`k`, not the parameter `m = k^2`).

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// `(sn, cn, dn)` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

impl EllipticTriple {
    /// Jacobi amplitude `am(u)` reconstructed as `atan2(sn, cn)`, in `(-pi, pi]`.
    pub fn amplitude(&self) -> f64 {
        self.sn.atan2(self.cn)
    }
}

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind `K(k)` for `0 <= k < 1`.
pub fn complete_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("K(k) needs 0 <= k < 1, got {k}")));
    }
    // (1 - k)(1 + k) keeps the complement accurate as k -> 1.
    let kc = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(FRAC_PI_2 / agm(1.0, kc))
}

/// Jacobi elliptic functions `sn(u, k)`, `cn(u, k)`, `dn(u, k)` for `0 <= k <= 1`.
///
/// Descending Landen / AGM recursion; `k = 0` and `k = 1` are evaluated in
/// closed form.
pub fn jacobi(u: f64, k: f64) -> Result<EllipticTriple> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("jacobi needs a finite argument, got {u}")));
    }
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain(format!("jacobi needs 0 <= k <= 1, got {k}")));
    }
    if k == 0.0 {
        let (s, c) = u.sin_cos();
        return Ok(EllipticTriple { sn: s, cn: c, dn: 1.0 });
    }
    if k == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok(EllipticTriple { sn: u.tanh(), cn: sech, dn: sech });
    }
    Ok(landen(u, (1.0 - k) * (1.0 + k)))
}

/// Core recursion in terms of the complementary parameter `mc = 1 - k^2 in (0, 1)`.
fn landen(u: f64, mc: f64) -> EllipticTriple {
    const CA: f64 = 1e-9;
    const DEPTH: usize = 16;
    let mut em = [0.0; DEPTH];
    let mut en = [0.0; DEPTH];
    let mut a = 1.0;
    let mut emc = mc;
    let mut c = 1.0;
    let mut last = 0;
    for i in 0..DEPTH {
        last = i;
        em[i] = a;
        emc = emc.sqrt();
        en[i] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= CA * a {
            break;
        }
        emc *= a;
        a = c;
    }
    let v = u * c;
    let (mut sn, mut cn) = v.sin_cos();
    let mut dn = 1.0;
    if sn != 0.0 {
        let mut a = cn / sn;
        c *= a;
        for ii in (0..=last).rev() {
            let b = em[ii];
            a *= c;
            c *= dn;
            dn = (en[ii] + a) / (b + a);
            a = c / b;
        }
        let r = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { r } else { -r };
        cn = c * sn;
    }
    EllipticTriple { sn, cn, dn }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn k_at_zero() {
        assert_eq!(complete_k(0.0).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn k_domain() {
        assert!(complete_k(1.0).is_err());
        assert!(complete_k(-0.1).is_err());
        assert!(jacobi(0.3, 1.2).is_err());
        assert!(jacobi(f64::INFINITY, 0.5).is_err());
    }

    #[test]
    fn origin_values() {
        for k in [0.0, 0.3, 0.9, 1.0] {
            let t = jacobi(0.0, k).unwrap();
            assert_eq!((t.sn, t.cn, t.dn), (0.0, 1.0, 1.0));
        }
    }

    #[test]
    fn quarter_period() {
        let k = 0.8;
        let kk = complete_k(k).unwrap();
        let t = jacobi(kk, k).unwrap();
        assert!((t.sn - 1.0).abs() < 1e-13);
        assert!(t.cn.abs() < 1e-12);
        assert!((t.dn - (1.0 - k * k).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn degenerate_moduli() {
        for u in [-3.0, -0.4, 0.7, 2.9, 11.0] {
            let t = jacobi(u, 0.0).unwrap();
            assert_eq!((t.sn, t.cn, t.dn), (f64::sin(u), f64::cos(u), 1.0));
            let h = jacobi(u, 1.0).unwrap();
            assert_eq!(h.sn, u.tanh());
            assert_eq!(h.cn, 1.0 / u.cosh());
        }
    }

    #[test]
    fn near_one_modulus_matches_hyperbolic() {
        let t = jacobi(1.5, 1.0 - 1e-14).unwrap();
        assert!((t.sn - 1.5f64.tanh()).abs() < 1e-12);
        assert!((t.dn - 1.0 / 1.5f64.cosh()).abs() < 1e-12);
    }

    #[test]
    fn odd_even_symmetry() {
        let a = jacobi(1.3, 0.7).unwrap();
        let b = jacobi(-1.3, 0.7).unwrap();
        assert_eq!(a.sn, -b.sn);
        assert_eq!(a.cn, b.cn);
        assert_eq!(a.dn, b.dn);
        assert!((a.amplitude() + b.amplitude()).abs() < 1e-15);
        assert!(PI > a.amplitude());
    }
}
