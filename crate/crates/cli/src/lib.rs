//! Command-line front end: job specs, named fixtures, dispatch and reports.

pub mod error;
pub mod fixtures;
pub mod job;
pub mod report;
pub mod run;

pub use error::{CliError, CliResult};
pub use fixtures::{load_fixture, FIXTURE_NAMES};
pub use job::JobSpec;
pub use run::{run, CheckKind, Command, Options};
