use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("ConfigError: {0}")]
    Config(String),

    #[error("ConfigError: cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] mdtgn::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// `2` for anything the user can fix in the configuration, `3` for
    /// failures of the numerics themselves.
    pub fn exit_code(&self) -> i32 {
        use mdtgn::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::NonCommensurate(_)
                | E::UnknownSpec(_)
                | E::InvalidArgument(_)
                | E::SupportViolation(_)
                | E::GaussLawViolated(_)
                | E::ConeOutsideGrid(_) => 2,
                E::SmallnessViolated(_) | E::NonConvergence { .. } | E::StepCollapse(_) => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
