//! Scenario-driven checks and the report they produce.

pub mod checks;
pub mod example;
pub mod random;
pub mod run;
pub mod scenario;

pub use checks::{CheckReport, PropertySuite, Witness};
pub use run::{execute, exit_code, run_scenario, RunOptions, RunOutcome, RunReport};
pub use scenario::Scenario;
