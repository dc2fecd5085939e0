//! Repair of corrupt structured inputs from parser feedback alone.
//!
//! The only thing the engine asks of a format is a feedback parser that
//! tells a valid input (`Complete`) apart from a prefix of one
//! (`Incomplete`) and from bytes no suffix can fix (`Incorrect`). With that,
//! [`repair::repair`] deletes and synthesizes bytes at the parse boundary
//! until the input is valid again. [`ddmax`] provides the deletion-only
//! maximizing delta debugging baseline, and [`bench`] the mutation corpus,
//! metrics and benchmark runner used to compare the two.

pub mod bench;
pub mod ddmax;
pub mod formats;
pub mod oracle;
pub mod repair;

pub use formats::Format;
pub use oracle::{FormatOracle, OracleError, OracleSession, ParseFeedback, Scanner};
pub use repair::{repair, RepairConfig, RepairError, RepairThread};
