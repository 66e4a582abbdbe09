//! Exponential smallness of the splitting: fit `ln omega` against `1/hbar`
//! and compare the slope with the Agmon distance between the wells.

use dwlab::grid::Grid1D;
use dwlab::spectral::{agmon_distance, splitting_scan, validate_potential, PotentialSpec};

fn main() -> dwlab::Result<()> {
    let spec = PotentialSpec::quartic(2.0, 1.0)?;
    let grid = Grid1D::new(3.0, 1024)?;
    validate_potential(&spec, &grid).require()?;
    let hbars = [0.2, 0.15, 0.12, 0.1, 0.08, 0.06];
    let fit = splitting_scan(&spec, grid, 1.0, &hbars)?;
    println!("{:>6} {:>14} {:>14} {:>10}", "hbar", "omega", "gap3", "c");
    for p in &fit.points {
        println!("{:>6} {:>14.6e} {:>14.6e} {:>10.6}", p.hbar, p.omega, p.gap3, p.c);
    }
    println!("slope = {:.6}, R^2 = {:.8}", fit.slope, fit.r_squared);
    println!("Gamma_0 = {:.6}", agmon_distance(&spec, 0.0)?);
    println!("slope / (-sqrt(2m) Gamma_0) = {:.6}", fit.slope_ratio_mass_normalized);
    Ok(())
}
