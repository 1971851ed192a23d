//! Configuration, orchestration and file output for the `timebin-sim`
//! command-line tool.

pub mod config;
pub mod output;
pub mod run;
pub mod units;

pub use config::{load, RunConfig};
pub use run::{run, Command};
