//! Feedback parsers for the supported input formats.
//!
//! Each parser is a resumable single-pass scanner: feeding `n` bytes costs
//! O(n), and a scanner can be cloned at any prefix to resume from there.
//! All of them classify raw bytes; nothing assumes UTF-8.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{FormatOracle, ParseFeedback, Scanner};

pub mod ini;
pub mod json;
pub mod sexp;
pub mod tinyc;

pub use ini::IniOracle;
pub use json::JsonOracle;
pub use sexp::SexpOracle;
pub use tinyc::TinyCOracle;

/// Registered format identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Ini,
    Sexp,
    #[serde(rename = "tinyc")]
    TinyC,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown format `{0}` (expected one of: json, ini, sexp, tinyc)")]
pub struct UnknownFormat(pub String);

impl Format {
    pub const ALL: [Format; 4] = [Format::Json, Format::Ini, Format::Sexp, Format::TinyC];

    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Ini => "ini",
            Format::Sexp => "sexp",
            Format::TinyC => "tinyc",
        }
    }

    /// Shared oracle instance for this format.
    pub fn oracle(self) -> Arc<dyn FormatOracle> {
        static ORACLES: OnceLock<[Arc<dyn FormatOracle>; 4]> = OnceLock::new();
        let all = ORACLES.get_or_init(|| {
            [
                Arc::new(JsonOracle),
                Arc::new(IniOracle),
                Arc::new(SexpOracle),
                Arc::new(TinyCOracle),
            ]
        });
        all[self as usize].clone()
    }

    pub fn scanner(self) -> Box<dyn Scanner> {
        match self {
            Format::Json => JsonOracle.scanner(),
            Format::Ini => IniOracle.scanner(),
            Format::Sexp => SexpOracle.scanner(),
            Format::TinyC => TinyCOracle.scanner(),
        }
    }

    pub fn classify(self, bytes: &[u8]) -> ParseFeedback {
        let mut scanner = self.scanner();
        scanner.push_all(bytes);
        scanner.verdict()
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "ini" => Ok(Format::Ini),
            "sexp" => Ok(Format::Sexp),
            "tinyc" => Ok(Format::TinyC),
            other => Err(UnknownFormat(other.to_string())),
        }
    }
}

pub fn classify_json(bytes: &[u8]) -> ParseFeedback {
    Format::Json.classify(bytes)
}

pub fn classify_ini(bytes: &[u8]) -> ParseFeedback {
    Format::Ini.classify(bytes)
}

pub fn classify_sexp(bytes: &[u8]) -> ParseFeedback {
    Format::Sexp.classify(bytes)
}

pub fn classify_tinyc(bytes: &[u8]) -> ParseFeedback {
    Format::TinyC.classify(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trips_names() {
        for format in Format::ALL {
            assert_eq!(format.name().parse::<Format>().unwrap(), format);
            assert_eq!(format.oracle().name(), format.name());
        }
        assert!("nosuch".parse::<Format>().is_err());
    }

    #[test]
    fn empty_input_verdicts_are_format_defined() {
        assert_eq!(classify_ini(b""), ParseFeedback::Complete);
        assert_eq!(classify_json(b""), ParseFeedback::Incomplete);
        assert_eq!(classify_sexp(b""), ParseFeedback::Incomplete);
        assert_eq!(classify_tinyc(b""), ParseFeedback::Incomplete);
    }
}
