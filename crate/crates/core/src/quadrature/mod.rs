//! Deterministic quadrature: adaptive Gauss–Kronrod panels, integrals over
//! the ξ-line, numeric marginals for each symmetry class and the bound table.

pub mod bounds;
pub mod gk;
pub mod line;
pub mod probability;

pub use bounds::{bound_targets, compute_bound, compute_bounds, BoundRow, BoundTarget};
pub use gk::{integrate, QuadratureResult, Tolerance};
pub use line::{integrate_line, integrate_line_split, XI_CUTOFF};
pub use probability::{
    boundary_halve, jacobian_numeric, jacobian_numeric_weighted, power_class_probability, sep_probability,
    BetaParameter, DiagonalWeight, NumericJacobian,
};
