//! Library half of the CLI: scenario parsing, subcommand execution, and
//! artifact emission. The binary in `main.rs` is a thin argument shell so
//! that integration tests can drive the same code in process.

pub mod emit;
pub mod run;
pub mod scenario;

pub use run::{error_json, exit_code_for, run, Command, Format, RunOpts, RunOutput};
pub use scenario::{PlanDoc, Scenario};
