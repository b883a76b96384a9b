use std::fmt;

use spotfou::Error;

/// Exit status 2 for bad parameters, 3 for data or pipeline failures, 1 for output I/O.
#[derive(Debug)]
pub enum CliError {
    Param(String),
    Data(String),
    Io(String),
}

impl CliError {
    /// Any library error as a data failure (exit 3), tagged with its variant name.
    pub fn data(e: Error) -> Self {
        CliError::Data(format!("{}: {e}", kind(&e)))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param(_) => 2,
            CliError::Data(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Param(m) => write!(f, "invalid parameter: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = format!("{}: {e}", kind(&e));
        match e {
            Error::InvalidWindow
            | Error::InvalidHurst(_)
            | Error::Embedding(_)
            | Error::UnstableStep(_)
            | Error::InvalidTime(_)
            | Error::InvalidProbability(_)
            | Error::InvalidInterval { .. }
            | Error::NonStationary { .. }
            | Error::InvalidParameter(_) => CliError::Param(msg),
            Error::Io(_) => CliError::Io(msg),
            _ => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Variant name of a library error, e.g. `NonStationary`.
pub fn kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}
