//! Double-well Gross-Pitaevskii dynamics and its two-mode reduction.
//!
//! * [`grid`]: uniform grids, complex fields, norms and the odd observable.
//! * [`spectral`]: double-well validation, the discrete Hamiltonian, the ground
//!   doublet `(lambda_1, lambda_2, phi_1, phi_2)`, the splitting `omega` and
//!   the barrier integral.
//! * [`elliptic`]: Jacobi `sn`, `cn`, `dn` and `K(k)`.
//! * [`twomode`]: the two-mode equations, their closed-form elliptic solution,
//!   regime classification and the critical nonlinearity.
//! * [`gpe`]: time propagation of the full equation, projections onto the
//!   doublet, conservation and remainder diagnostics, and the scan comparing
//!   the full dynamics with the two-mode reduction.
//! * [`cli`]: the JSON-configured batch front end behind the `dwlab` binary.

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod gpe;
pub mod grid;
pub mod spectral;
pub mod twomode;

pub use error::{Error, Result};
