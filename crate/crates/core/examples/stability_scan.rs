//! Field against two-mode dynamics at fixed `eta` as `hbar` decreases.

use dwlab::gpe::{stability_experiment, StabilityConfig};
use dwlab::spectral::PotentialSpec;

fn main() -> dwlab::Result<()> {
    let mut cfg = StabilityConfig::new(PotentialSpec::quartic(2.0, 1.0)?, 3.0, 512, vec![0.2, 0.15, 0.1], 1.0);
    cfg.tau_prime = 2.0;
    cfg.dtau = 2e-3;
    cfg.continuum_modes = 32;
    let report = stability_experiment(&cfg)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "hbar", "omega", "max|a_R-b_R|", "max|psi_c|");
    for r in &report.rows {
        println!("{:>6} {:>12.4e} {:>12.4e} {:>12.4e}", r.hbar, r.omega, r.max_dev_r, r.max_psi_c);
    }
    println!("deviation decreasing: {}, psi_c decreasing: {}", report.deviation_monotone, report.psi_c_monotone);
    Ok(())
}
