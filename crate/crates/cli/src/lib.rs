//! Library side of the `rhsim` command line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod render;
pub mod run;

pub use error::CliError;
