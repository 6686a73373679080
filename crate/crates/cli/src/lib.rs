//! Command-line front end for `collapse-core`: configuration, dispatch and
//! report emission. The `collapse` binary is a thin wrapper over
//! [`parse_env_config`] and [`execute`].

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod verify;

pub use config::{parse_config, parse_env_config, RunConfig};
pub use error::{exit, CliError};
pub use run::{execute, run_command, verdict};
