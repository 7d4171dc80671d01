//! Configuration, file formats and command implementations behind the
//! `landau` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod output;

pub use config::{InitSpec, RunConfig};
pub use error::{CliError, Result};
