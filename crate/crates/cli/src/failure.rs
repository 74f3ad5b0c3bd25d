use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use lurcert::Error;

/// Successful run; `Entangled` gets its own exit status for scripting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Entangled,
}

impl Outcome {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Ok => ExitCode::SUCCESS,
            Outcome::Entangled => ExitCode::from(3),
        }
    }
}

/// Error reported as a single `error[CODE]: message` line.
#[derive(Debug)]
pub struct Failure {
    pub code: &'static str,
    pub message: String,
    pub usage: bool,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: "E_USAGE",
            message: message.into(),
            usage: true,
        }
    }

    pub fn validation(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            usage: false,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::validation("E_IO", format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(if self.usage { 1 } else { 2 })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Keep it to one line whatever the source message looks like.
        let flat = self
            .message
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        write!(f, "error[{}]: {flat}", self.code)
    }
}

fn code_of(err: &Error) -> &'static str {
    match err {
        Error::Format(_) => "E_PARSE",
        Error::NotHermitian { .. } => "E_NOT_HERMITIAN",
        Error::TraceNotOne { .. } => "E_TRACE",
        Error::NotPositive { .. } => "E_NOT_POSITIVE",
        Error::NonFinite { .. } => "E_NON_FINITE",
        Error::DimMismatch { .. }
        | Error::Shape(_)
        | Error::Cardinality { .. }
        | Error::EmptySet => "E_SHAPE",
        Error::KindMismatch { .. } => "E_KIND",
        Error::InvalidParameter(_) => "E_PARAM",
        Error::ComplexExpectation { .. }
        | Error::NegativeVariance { .. }
        | Error::NoConvergence { .. } => "E_NUMERIC",
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Self::validation(code_of(&err), err.to_string())
    }
}
