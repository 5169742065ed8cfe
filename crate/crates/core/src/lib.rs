//! Hilbert-Schmidt separability probabilities of two-qubit density matrices.
//!
//! The crate works in Bloore coordinates (diagonal plus six correlations),
//! where the Peres-Horodecki test depends on the diagonal only through the
//! cross-ratio variable ξ. On top of that it provides:
//!
//! - [`desf`]: closed-form separability functions `S(ξ)`, the marginal
//!   density `J(ξ)` and curve combinators;
//! - [`quadrature`]: `∫ S(ξ) J(ξ) dξ` and the numerical marginals for β = 1, 2, 4;
//! - [`qmc`]: scrambled Sobol estimation of separability functions and
//!   probabilities, and the cube-integration schemes for minor relaxations;
//! - [`report`]: run configuration, CSV/JSON artifacts and summary tables.

pub mod bloore;
pub mod complex;
pub mod desf;
pub mod error;
pub mod linalg;
pub mod provenance;
pub mod qmc;
pub mod quadrature;
pub mod report;

pub use bloore::{BlooreState, Correlations, DensityMatrix4, Pair, XiValue};
pub use desf::{DesfCurve, JacobianCurve};
pub use error::{Error, Result};
pub use provenance::Provenance;
