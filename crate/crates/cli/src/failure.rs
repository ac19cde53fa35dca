//! Exit-status classification.

use std::fmt;
use scalefit_core::Error;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or unusable input; exit 2.
    Usage(String),
    /// An estimator or generator could not produce a result; exit 1.
    Compute(String),
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure::Usage(message.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }

    /// Wraps a library error raised while computing `context`. Parameter
    /// errors still count as usage errors because they trace back to a flag.
    pub fn during(context: &str) -> impl Fn(Error) -> Failure + '_ {
        move |e| match e {
            Error::InvalidParameter { .. } | Error::TooShort { .. } => {
                Failure::Usage(format!("{context}: {e}"))
            }
            _ => Failure::Compute(format!("{context}: {e}")),
        }
    }

    /// Wraps a library error raised while writing an output file.
    pub fn output(e: Error) -> Failure {
        Failure::Compute(format!("writing output: {e}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Compute(m) => f.write_str(m),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;
