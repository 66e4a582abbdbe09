//! Linear tunnelling: start in the right well and watch the imbalance follow
//! `cos(2 omega t / hbar)` over one beating period.

use std::sync::Arc;

use dwlab::gpe::{propagate, EvolutionConfig};
use dwlab::grid::Grid1D;
use dwlab::spectral::{assemble_hamiltonian, lowest_doublet, PotentialSpec};

fn main() -> dwlab::Result<()> {
    let grid = Grid1D::new(3.0, 1024)?;
    let h = assemble_hamiltonian(grid, &PotentialSpec::quartic(2.0, 1.0)?, 0.1, 1.0)?;
    let basis = Arc::new(lowest_doublet(&h, 1)?);
    println!("omega = {:e}, beating period T = {:e}", basis.omega, basis.beating_period());

    let cfg = EvolutionConfig::new(basis.clone(), 0.0);
    let traj = propagate(&basis.phi_r_wave(), &cfg)?;
    let mut worst = 0.0f64;
    for s in &traj.samples {
        worst = worst.max((s.z - (2.0 * s.tau).cos()).abs());
    }
    for s in traj.samples.iter().step_by(traj.samples.len() / 8) {
        println!("tau = {:7.4}  z = {:+.12}  cos(2 tau) = {:+.12}", s.tau, s.z, (2.0 * s.tau).cos());
    }
    println!("max |z - cos(2 tau)| = {worst:e}");
    Ok(())
}
