use thiserror::Error;

/// Everything a subcommand can fail with, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] eit2des_core::Error),
    #[error("{failed} of {total} validation checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// 0 success, 1 configuration, 2 numerical, 3 validation.
    pub fn exit_code(&self) -> i32 {
        use eit2des_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io { .. } => 1,
            CliError::Core(
                E::InvalidParameter { .. } | E::Configuration(_) | E::Resource { .. },
            ) => 1,
            CliError::Core(_) => 2,
            CliError::ChecksFailed { .. } => 3,
        }
    }
}
