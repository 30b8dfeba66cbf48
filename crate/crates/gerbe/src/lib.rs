//! Scenario files, deterministic reports and the `gerbe` command line on
//! top of `gerbe-core`.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;

pub use commands::{run, Command, Options, Suite};
pub use error::LoadError;
pub use report::Report;
pub use scenario::Scenario;
