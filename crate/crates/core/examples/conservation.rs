//! Norm and energy drift of the position-space integrators on a nonlinear run.

use std::sync::Arc;
use std::time::Instant;

use dwlab::gpe::{propagate, EvolutionConfig, Method};
use dwlab::grid::Grid1D;
use dwlab::spectral::{assemble_hamiltonian, lowest_doublet, PotentialSpec};

fn main() -> dwlab::Result<()> {
    let grid = Grid1D::new(3.0, 512)?;
    let h = assemble_hamiltonian(grid, &PotentialSpec::quartic(2.0, 1.0)?, 0.3, 1.0)?;
    let basis = Arc::new(lowest_doublet(&h, 1)?);
    for method in [Method::SplitStep, Method::CrankNicolson, Method::Spectral] {
        let mut cfg = EvolutionConfig::with_eta(basis.clone(), 1.0);
        cfg.method = method;
        cfg.t_end /= 4.0;
        cfg.dt = cfg.t_end / 4000.0;
        cfg.stride = 100;
        let start = Instant::now();
        let traj = propagate(&basis.phi_r_wave(), &cfg)?;
        println!(
            "{method:?}: norm drift {:.2e}, energy drift {:.2e}, final z {:+.8}, {:.2?}",
            traj.norm_drift(),
            traj.energy_drift(),
            traj.samples.last().map_or(f64::NAN, |s| s.z),
            start.elapsed()
        );
    }
    Ok(())
}
