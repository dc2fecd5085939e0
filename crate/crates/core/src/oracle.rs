//! Three-valued parser feedback and oracle-run accounting.
//!
//! Every format exposes a push-based [`Scanner`]. An [`OracleSession`] wraps
//! one format for the duration of a repair job and charges one run for every
//! feedback query, no matter how the query is evaluated internally.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::Format;

/// Verdict of a feedback parser for one byte sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseFeedback {
    /// The bytes form a valid input.
    Complete,
    /// The bytes are a strict prefix of some valid input.
    Incomplete,
    /// No suffix turns the bytes into a valid input.
    Incorrect,
}

impl ParseFeedback {
    pub fn is_incorrect(self) -> bool {
        self == ParseFeedback::Incorrect
    }

    pub fn is_complete(self) -> bool {
        self == ParseFeedback::Complete
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ParseFeedback::Complete => "complete",
            ParseFeedback::Incomplete => "incomplete",
            ParseFeedback::Incorrect => "incorrect",
        }
    }
}

impl fmt::Display for ParseFeedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Incremental parser state. Bytes are pushed one at a time; once a push
/// reports failure the scanner stays failed.
pub trait Scanner: Send {
    /// Feeds one byte. Returns `false` iff the bytes fed so far can no longer
    /// be completed to a valid input.
    fn push(&mut self, byte: u8) -> bool;

    /// Verdict for the bytes fed so far.
    fn verdict(&self) -> ParseFeedback;

    fn clone_box(&self) -> Box<dyn Scanner>;

    fn push_all(&mut self, bytes: &[u8]) -> bool {
        bytes.iter().all(|&b| self.push(b))
    }
}

impl Clone for Box<dyn Scanner> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// A feedback parser for one input format.
pub trait FormatOracle: Send + Sync {
    fn name(&self) -> &str;

    /// A scanner positioned at the empty input.
    fn scanner(&self) -> Box<dyn Scanner>;

    fn classify(&self, bytes: &[u8]) -> ParseFeedback {
        let mut scanner = self.scanner();
        scanner.push_all(bytes);
        scanner.verdict()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle budget of {limit} runs exhausted")]
    BudgetExhausted { limit: u64 },
    #[error("wall-clock deadline exceeded")]
    DeadlineExceeded,
}

/// One repair job's view of a format oracle.
///
/// Not shared between jobs; it is `Send` so a job can move between worker
/// threads.
pub struct OracleSession {
    oracle: Arc<dyn FormatOracle>,
    run_count: u64,
    budget: Option<u64>,
    deadline: Option<Instant>,
    log: Option<Vec<Vec<u8>>>,
}

impl fmt::Debug for OracleSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleSession")
            .field("format", &self.oracle.name())
            .field("run_count", &self.run_count)
            .field("budget", &self.budget)
            .finish()
    }
}

impl OracleSession {
    pub fn new(format: Format) -> Self {
        Self::with_oracle(format.oracle())
    }

    pub fn with_oracle(oracle: Arc<dyn FormatOracle>) -> Self {
        OracleSession {
            oracle,
            run_count: 0,
            budget: None,
            deadline: None,
            log: None,
        }
    }

    /// Caps the total number of feedback queries.
    pub fn with_budget(mut self, limit: u64) -> Self {
        self.budget = Some(limit);
        self
    }

    pub fn with_deadline(mut self, deadline: Instant) -> Self {
        self.deadline = Some(deadline);
        self
    }

    /// Records the bytes of every query; see [`OracleSession::queries`].
    pub fn with_query_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn format_name(&self) -> &str {
        self.oracle.name()
    }

    pub fn oracle(&self) -> &Arc<dyn FormatOracle> {
        &self.oracle
    }

    pub fn run_count(&self) -> u64 {
        self.run_count
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    /// Logged queries, in issue order. Empty unless the log was enabled.
    pub fn queries(&self) -> &[Vec<u8>] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn take_queries(&mut self) -> Vec<Vec<u8>> {
        self.log.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn feedback(&mut self, bytes: &[u8]) -> Result<ParseFeedback, OracleError> {
        self.charge(bytes)?;
        Ok(self.oracle.classify(bytes))
    }

    /// Feedback on the first `len` bytes.
    pub fn check_prefix(&mut self, bytes: &[u8], len: usize) -> Result<ParseFeedback, OracleError> {
        assert!(len <= bytes.len(), "prefix length {len} out of range");
        self.feedback(&bytes[..len])
    }

    /// Binary verdict used by delta debugging: passes iff `Complete`.
    pub fn pass_fail(&mut self, bytes: &[u8]) -> Result<bool, OracleError> {
        Ok(self.feedback(bytes)?.is_complete())
    }

    pub fn scanner(&self) -> Box<dyn Scanner> {
        self.oracle.scanner()
    }

    /// Accounts for one query on `queried` whose verdict the caller computes
    /// itself from an equivalent scanner state.
    pub(crate) fn charge(&mut self, queried: &[u8]) -> Result<(), OracleError> {
        if let Some(limit) = self.budget {
            if self.run_count >= limit {
                return Err(OracleError::BudgetExhausted { limit });
            }
        }
        // Checking the clock on every query is measurable on tiny inputs.
        if self.run_count.is_multiple_of(64) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(OracleError::DeadlineExceeded);
                }
            }
        }
        self.run_count += 1;
        if let Some(log) = self.log.as_mut() {
            log.push(queried.to_vec());
        }
        Ok(())
    }
}

/// Evaluates prefix queries on one byte sequence, reusing a scanner
/// checkpoint at a known non-incorrect prefix.
///
/// Every call to [`PrefixProbe::probe`] counts as one oracle run.
pub(crate) struct PrefixProbe<'a> {
    content: &'a [u8],
    checkpoint: Box<dyn Scanner>,
    checkpoint_len: usize,
}

impl<'a> PrefixProbe<'a> {
    /// `checkpoint` must be the scanner state after `content[..checkpoint_len]`.
    pub(crate) fn new(content: &'a [u8], checkpoint: Box<dyn Scanner>, checkpoint_len: usize) -> Self {
        debug_assert!(checkpoint_len <= content.len());
        PrefixProbe {
            content,
            checkpoint,
            checkpoint_len,
        }
    }

    pub(crate) fn from_start(session: &OracleSession, content: &'a [u8]) -> Self {
        Self::new(content, session.scanner(), 0)
    }

    pub(crate) fn probe(&self, session: &mut OracleSession, len: usize) -> Result<ParseFeedback, OracleError> {
        session.charge(&self.content[..len])?;
        if len < self.checkpoint_len {
            return Ok(session.oracle.classify(&self.content[..len]));
        }
        let mut scanner = self.checkpoint.clone();
        scanner.push_all(&self.content[self.checkpoint_len..len]);
        Ok(scanner.verdict())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_feedback_examples() {
        let mut s = OracleSession::new(Format::Json);
        assert_eq!(s.feedback(b"[]").unwrap(), ParseFeedback::Complete);
        assert_eq!(s.feedback(b"[").unwrap(), ParseFeedback::Incomplete);
        assert_eq!(s.feedback(b"]").unwrap(), ParseFeedback::Incorrect);
        assert_eq!(s.run_count(), 3);
    }

    #[test]
    fn check_prefix_examples() {
        let mut s = OracleSession::new(Format::Json);
        assert_eq!(s.check_prefix(b"[*]", 1).unwrap(), ParseFeedback::Incomplete);
        assert_eq!(s.check_prefix(b"[*]", 2).unwrap(), ParseFeedback::Incorrect);
        for format in Format::ALL {
            let mut s = OracleSession::new(format);
            let expected = format.classify(b"");
            assert_eq!(s.check_prefix(b"abc", 0).unwrap(), expected);
            assert_eq!(s.run_count(), 1);
        }
    }

    #[test]
    fn pass_fail_examples() {
        assert!(OracleSession::new(Format::Ini).pass_fail(b"").unwrap());
        assert!(!OracleSession::new(Format::Json).pass_fail(b"[*]+").unwrap());
        assert!(OracleSession::new(Format::Json).pass_fail(b"11").unwrap());
    }

    #[test]
    fn budget_is_enforced_before_the_query_runs() {
        let mut s = OracleSession::new(Format::Json).with_budget(2);
        s.feedback(b"[").unwrap();
        s.feedback(b"[]").unwrap();
        assert_eq!(s.feedback(b"[]"), Err(OracleError::BudgetExhausted { limit: 2 }));
        assert_eq!(s.run_count(), 2);
    }

    #[test]
    fn expired_deadline_stops_queries() {
        let mut s = OracleSession::new(Format::Json).with_deadline(Instant::now());
        assert_eq!(s.feedback(b"[]"), Err(OracleError::DeadlineExceeded));
    }

    #[test]
    fn probe_matches_direct_classification() {
        let content = br#"{"a": [1, 2, *]}"#;
        let session = OracleSession::new(Format::Json);
        let mut counting = OracleSession::new(Format::Json).with_query_log();
        let mut checkpoint = session.scanner();
        checkpoint.push_all(&content[..5]);
        let probe = PrefixProbe::new(content, checkpoint, 5);
        for len in 0..=content.len() {
            let got = probe.probe(&mut counting, len).unwrap();
            assert_eq!(got, Format::Json.classify(&content[..len]), "len {len}");
        }
        assert_eq!(counting.run_count() as usize, content.len() + 1);
        assert_eq!(counting.queries()[3], content[..3].to_vec());
    }

    #[test]
    fn session_is_send() {
        fn assert_send<T: Send>() {}
        assert_send::<OracleSession>();
    }
}
