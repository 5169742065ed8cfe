//! Quasi-Monte Carlo estimation and cube-integration schemes.

pub mod criteria;
pub mod cube;
pub mod engine;
pub mod estimate;
pub mod estimators;
pub mod sampling;
pub mod sobol;

pub use criteria::SeparabilityTest;
pub use cube::{cube_paired, cube_single, cube_triple, CubeOptions, CubeSchemeSpec};
pub use engine::{run, EngineConfig, Kernel, RunStats};
pub use estimate::{table_probability, DesfRow, DesfTable, Estimate};
pub use estimators::{
    default_xi_grid, estimate_absolute, estimate_desf, estimate_sep_prob, symmetric_grid, SepProbResult, StateFamily,
    TestResult,
};
pub use sampling::{BetaQuantile, DiagonalSampler};
pub use sobol::LowDiscrepancySequence;
