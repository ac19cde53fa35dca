//! Creation timestamps, pinned by `SCALEFIT_FIXED_CLOCK` for reproducible runs.

use chrono::{DateTime, SecondsFormat, Utc};

use crate::failure::{CliResult, Failure};

pub const FIXED_CLOCK_VAR: &str = "SCALEFIT_FIXED_CLOCK";

/// Source of the `created` stamp written into metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clock {
    System,
    /// Normalised RFC 3339 UTC timestamp.
    Fixed(String),
    /// A fixed-clock value that failed to parse; reported when first used.
    Invalid(String),
}

impl Clock {
    pub fn from_env() -> Self {
        match std::env::var(FIXED_CLOCK_VAR) {
            Ok(v) => Self::fixed(&v),
            Err(std::env::VarError::NotPresent) => Clock::System,
            Err(e) => Clock::Invalid(format!("{FIXED_CLOCK_VAR}: {e}")),
        }
    }

    pub fn fixed(value: &str) -> Self {
        match DateTime::parse_from_rfc3339(value.trim()) {
            Ok(t) => Clock::Fixed(
                t.with_timezone(&Utc)
                    .to_rfc3339_opts(SecondsFormat::Secs, true),
            ),
            Err(e) => Clock::Invalid(format!(
                "{FIXED_CLOCK_VAR}={value:?} is not an RFC 3339 timestamp: {e}"
            )),
        }
    }

    pub fn timestamp(&self) -> CliResult<String> {
        match self {
            Clock::System => Ok(Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)),
            Clock::Fixed(t) => Ok(t.clone()),
            Clock::Invalid(msg) => Err(Failure::usage(msg.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_values_normalise_to_utc() {
        assert_eq!(
            Clock::fixed("2024-03-01T12:00:00+02:00").timestamp().unwrap(),
            "2024-03-01T10:00:00Z"
        );
        assert!(Clock::fixed("yesterday").timestamp().is_err());
        assert!(Clock::System.timestamp().unwrap().ends_with('Z'));
    }
}
