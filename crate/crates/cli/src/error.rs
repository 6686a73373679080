use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    /// `verify` ran and at least one property failed.
    pub const VERIFY_FAILED: u8 = 1;
    /// Bad flags, missing required field, unknown config key, invalid combination.
    pub const USAGE: u8 = 2;
    /// Value out of range or of the wrong type.
    pub const INVALID_VALUE: u8 = 3;
    /// Config file missing, unreadable or not valid TOML.
    pub const CONFIG_UNREADABLE: u8 = 4;
    /// The model itself failed (step underflow, runaway walk, infinite bound).
    pub const NUMERICAL: u8 = 5;
    /// Report or dump file could not be written.
    pub const OUTPUT_IO: u8 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Includes `--help` and `--version`, which exit 0.
    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("{0}")]
    Usage(String),

    #[error("missing required field `{field}` for `{command}`")]
    Missing {
        field: &'static str,
        command: &'static str,
    },

    #[error("`{field}` cannot be combined with {context}")]
    Conflict {
        field: &'static str,
        context: String,
    },

    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error("cannot read config file {}: {message}", path.display())]
    ConfigUnreadable { path: PathBuf, message: String },

    #[error(transparent)]
    Model(#[from] collapse_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} of {total} properties failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        use clap::error::ErrorKind;
        match self {
            CliError::Clap(e) => match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                ErrorKind::InvalidValue | ErrorKind::ValueValidation => exit::INVALID_VALUE,
                _ => exit::USAGE,
            },
            CliError::Usage(_) | CliError::Missing { .. } | CliError::Conflict { .. } => {
                exit::USAGE
            }
            CliError::Invalid { .. } => exit::INVALID_VALUE,
            CliError::ConfigUnreadable { .. } => exit::CONFIG_UNREADABLE,
            CliError::Model(e) if e.is_numerical() => exit::NUMERICAL,
            CliError::Model(_) => exit::INVALID_VALUE,
            CliError::Output { .. } => exit::OUTPUT_IO,
            CliError::VerifyFailed { .. } => exit::VERIFY_FAILED,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
