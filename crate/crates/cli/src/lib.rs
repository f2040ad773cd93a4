//! Command-line front end for the squeezing pipeline: configuration
//! parsing, point and sweep commands, and result serialization.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_point, cmd_sweep, exit, SweepReport};
pub use config::RunConfig;
