//! Command-line front-end for the weakcoupling toolkit.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

use weakcoupling::Error;

pub use commands::{run, Command};
pub use config::ExperimentConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(Error),
    Resolution(Error),
    Io(String),
}

impl CliError {
    /// Library errors raised while building inputs are configuration errors.
    pub fn from_config(e: Error) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::Resolution(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Resolution(_) => "resolution",
            CliError::Io(_) => "io",
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResolutionExceeded(_) | Error::BelowFloor(_) | Error::ScaleTooLarge(_) | Error::SizeExceeded { .. } => {
                CliError::Resolution(e)
            }
            Error::InvalidParameter(_)
            | Error::InvalidExponents(_)
            | Error::UnsupportedDimension(_)
            | Error::UnsupportedModel(_)
            | Error::NotRadial
            | Error::BoxTooSmall(_)
            | Error::DimensionMismatch { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Resolution(e) => write!(f, "resolution exceeded: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
