//! Diagonal-entry-parameterized separability functions (DESFs) and the
//! ξ-marginal they are integrated against.

pub mod catalog;
pub mod curve;
pub mod jacobian;

pub use catalog::{CatalogCurve, Side};
pub use curve::{combine, CombineOp, CurveExpr, DesfCurve};
pub use jacobian::{jacobian_closed, ClosedJacobian, JacobianCurve};
