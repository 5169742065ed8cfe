//! Run configuration, result artifacts and the command runners behind the CLI.

pub mod artifact;
pub mod config;
pub mod runner;
pub mod summary;

pub use artifact::{Artifact, CheckRow, ResultRecord};
pub use config::{parse_count, Command, OutputFormat, RunConfig, XiGrid};
pub use runner::{execute, run};
pub use summary::{report_summary, Role, Summary, SummaryRow};
