use std::fmt;

use quasimass::Error;

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Config(String),
    /// Exit 3.
    Numerical(String),
    /// Exit 4.
    Tolerance(String),
    /// Exit 1: file system trouble.
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Tolerance(_) => 4,
        }
    }

    /// Classifies a library error, prefixing `context`.
    pub fn from_core(context: &str, e: &Error) -> Self {
        let msg = if context.is_empty() {
            e.to_string()
        } else {
            format!("{context}: {e}")
        };
        if is_config_error(e) {
            Failure::Config(msg)
        } else {
            Failure::Numerical(msg)
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    match e {
        Error::AtRadius { source, .. } => is_config_error(source),
        Error::UnknownMetric(_)
        | Error::InvalidParameter(_)
        | Error::BadDimension(_)
        | Error::BadResolution(_)
        | Error::WrongChart { .. }
        | Error::WrongFamily { .. }
        | Error::DecayTooWeak { .. }
        | Error::UnknownEstimator(_)
        | Error::BadExponent(_)
        | Error::RepeatedAbscissa(_) => true,
        Error::OutOfDomain(_)
        | Error::HorizonViolation(_)
        | Error::QuadratureFailure(_)
        | Error::SingularMetric { .. }
        | Error::EigFailure { .. }
        | Error::NonFiniteIntegrand { .. }
        | Error::NotRound { .. }
        | Error::DegenerateFit { .. }
        | Error::FitFailure(_) => false,
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            Failure::Config(m) => ("config error", m),
            Failure::Numerical(m) => ("numerical failure", m),
            Failure::Tolerance(m) => ("tolerance violation", m),
            Failure::Io(m) => ("i/o error", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;
