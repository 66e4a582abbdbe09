//! A double well given as an `(x, V)` table instead of a formula.

use dwlab::grid::Grid1D;
use dwlab::spectral::{assemble_hamiltonian, lowest_doublet, validate_potential, PotentialSpec};

fn main() -> dwlab::Result<()> {
    let x: Vec<f64> = (0..=240).map(|j| -3.0 + 0.025 * j as f64).collect();
    let v: Vec<f64> = x.iter().map(|x| 1.5 * (x * x - 1.0).powi(2) + 0.2 * (x * x).min(4.0)).collect();
    let spec = PotentialSpec::tabulated(x, v)?;
    let grid = Grid1D::new(3.0, 1024)?;
    let report = validate_potential(&spec, &grid);
    for c in &report.checks {
        println!("{:<16} {}", c.name, if c.passed { "ok" } else { "FAILED" });
    }
    report.require()?;
    let h = assemble_hamiltonian(grid, &spec, 0.15, 1.0)?;
    let basis = lowest_doublet(&h, 1)?;
    println!("lambda1 = {:.12}, lambda2 = {:.12}, omega = {:e}", basis.lambda1, basis.lambda2, basis.omega);
    Ok(())
}
