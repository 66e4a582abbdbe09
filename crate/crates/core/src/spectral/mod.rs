//! Potential validation, the discrete linear Hamiltonian, its ground doublet,
//! the tunneling splitting and the barrier (Agmon) integral.

mod doublet;
mod hamiltonian;
mod potential;
mod splitting;
mod tridiag;

pub use doublet::{
    eigenstate_lp_report, lowest_doublet, overlap_sup, DoubletBasis, DoubletMethod, LpReport,
    LpRow, SECTOR_THRESHOLD,
};
pub(crate) use doublet::{even_to_full, lp_weight, odd_to_full, sectors};
pub use hamiltonian::{assemble_hamiltonian, DiscreteHamiltonian};
pub use potential::{validate_potential, CheckResult, PotentialSpec, ValidationReport};
pub use splitting::{agmon_distance, linear_fit, splitting_point, splitting_scan, SplittingFit, SplittingPoint};
pub use tridiag::{Scalar, SymTridiag};
