use std::fmt;

/// Failures of a command-line run, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Schema or value problem at `path`.
    Config {
        path: String,
        message: String,
    },
    Numerical(tlsbath::Error),
    Io(std::io::Error),
    /// Validation ran but `failed` criteria did not pass.
    ValidationFailed {
        failed: usize,
    },
}

impl CliError {
    pub fn config(path: impl Into<String>, message: String) -> Self {
        CliError::Config {
            path: path.into(),
            message,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
            CliError::ValidationFailed { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { path, message } => write!(f, "config error at `{path}`: {message}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::ValidationFailed { failed } => {
                write!(f, "{failed} validation criteria did not pass")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<tlsbath::Error> for CliError {
    fn from(e: tlsbath::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}
