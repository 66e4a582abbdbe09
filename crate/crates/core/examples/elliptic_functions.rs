//! Jacobi elliptic functions: identities and the quarter period.

use dwlab::elliptic::{complete_k, jacobi};

fn main() -> dwlab::Result<()> {
    for k in [0.0, 0.5, 0.9, 0.999] {
        let kk = complete_k(k)?;
        let quarter = jacobi(kk, k)?;
        println!("k = {k}: K = {kk:.15}, sn(K) = {:.15}, cn(K) = {:+.1e}", quarter.sn, quarter.cn);
        let mut worst = 0.0f64;
        for j in 0..=100 {
            let u = -5.0 + 0.1 * j as f64;
            let t = jacobi(u, k)?;
            worst = worst
                .max((t.sn * t.sn + t.cn * t.cn - 1.0).abs())
                .max((t.dn * t.dn + k * k * t.sn * t.sn - 1.0).abs());
        }
        println!("        max identity defect on [-5, 5]: {worst:.1e}");
    }
    Ok(())
}
