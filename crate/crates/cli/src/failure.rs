use std::process::ExitCode;

use cardwave::Error;
use thiserror::Error;

/// Why a command stopped; each variant has its own exit status.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
    /// The reader of stdout went away; not worth reporting.
    #[error("output closed")]
    Closed,
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 4,
            Failure::Closed => 0,
        })
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if let Error::Io(io) = e.root() {
            if io.kind() == std::io::ErrorKind::BrokenPipe {
                return Failure::Closed;
            }
        }
        let msg = e.to_string();
        if e.is_io() {
            Failure::Io(msg)
        } else if e.is_numerical() {
            Failure::Numeric(msg)
        } else {
            Failure::Usage(msg)
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        if let csv::ErrorKind::Io(io) = e.kind() {
            if io.kind() == std::io::ErrorKind::BrokenPipe {
                return Failure::Closed;
            }
        }
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        if e.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe) {
            return Failure::Closed;
        }
        Failure::Io(e.to_string())
    }
}
