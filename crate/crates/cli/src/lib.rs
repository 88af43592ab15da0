//! Library surface of the `nbmf` command-line tool, kept callable so
//! integration tests can drive the commands in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;

pub use commands::{cmd_benchmark, cmd_calibrate, cmd_factorize, cmd_generate};
pub use config::{
    resolve_benchmark, resolve_calibrate, resolve_factorize, resolve_generate, CommonArgs,
};
pub use error::{CliError, CliResult};
