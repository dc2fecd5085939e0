//! Lexical maximizing delta debugging: grows a passing subsequence of a
//! failing input by testing complements and subsets of the removed bytes at
//! increasing granularity.
//!
//! The algorithm assumes the empty input passes. That is false for most
//! formats (an empty JSON document is incomplete), so the assumption is never
//! tested during the search; an empty result is checked once at the end and
//! reported through [`DdmaxOutcome::verified`].

use thiserror::Error;

use crate::oracle::{OracleError, OracleSession};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdmaxError {
    #[error("input already passes")]
    InputPasses,
    #[error("input is empty and fails")]
    EmptyFails,
    #[error("granularity {n} exceeds the {remaining} removed bytes")]
    InvariantViolated { n: usize, remaining: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl DdmaxError {
    pub fn is_precondition(&self) -> bool {
        matches!(self, DdmaxError::InputPasses | DdmaxError::EmptyFails)
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self, DdmaxError::Oracle(_))
    }
}

/// The two corrections to the published recursion. Both default to on; the
/// switches exist to show what breaks without them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DdmaxRules {
    /// Stop as soon as a single byte remains removed.
    pub base_case: bool,
    /// Cap the next granularity by the removed bytes rather than the input.
    pub granularity_fix: bool,
}

impl Default for DdmaxRules {
    fn default() -> Self {
        DdmaxRules {
            base_case: true,
            granularity_fix: true,
        }
    }
}

/// A subsequence of `source`, as strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharSet<'a> {
    source: &'a [u8],
    kept: Vec<usize>,
}

impl<'a> CharSet<'a> {
    pub fn empty(source: &'a [u8]) -> Self {
        CharSet {
            source,
            kept: Vec::new(),
        }
    }

    /// Panics unless `kept` is strictly increasing and in range.
    pub fn new(source: &'a [u8], kept: Vec<usize>) -> Self {
        assert!(kept.windows(2).all(|w| w[0] < w[1]), "indices not increasing");
        assert!(kept.last().is_none_or(|&i| i < source.len()), "index out of range");
        CharSet { source, kept }
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn materialize(&self) -> Vec<u8> {
        self.kept.iter().map(|&i| self.source[i]).collect()
    }

    /// Indices of `source` not kept, in order.
    pub fn complement(&self) -> Vec<usize> {
        let mut kept = self.kept.iter().peekable();
        (0..self.source.len())
            .filter(|i| {
                if kept.peek() == Some(&i) {
                    kept.next();
                    false
                } else {
                    true
                }
            })
            .collect()
    }

    fn with(&self, extra: &[usize]) -> CharSet<'a> {
        let mut kept = Vec::with_capacity(self.kept.len() + extra.len());
        let (mut a, mut b) = (self.kept.iter().peekable(), extra.iter().peekable());
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            if x < y {
                kept.push(x);
                a.next();
            } else {
                kept.push(y);
                b.next();
            }
        }
        kept.extend(a);
        kept.extend(b);
        CharSet {
            source: self.source,
            kept,
        }
    }

    fn without(&self, removed: &[usize]) -> CharSet<'a> {
        let mut removed = removed.iter().peekable();
        let kept = (0..self.source.len())
            .filter(|i| {
                if removed.peek() == Some(&i) {
                    removed.next();
                    false
                } else {
                    true
                }
            })
            .collect();
        CharSet {
            source: self.source,
            kept,
        }
    }
}

/// Splits `delta` into `n` contiguous chunks whose sizes differ by at most
/// one; earlier chunks take the remainder.
pub fn partition(delta: &[usize], n: usize) -> Vec<&[usize]> {
    assert!(n >= 1 && n <= delta.len(), "cannot split {} indices into {n}", delta.len());
    let (q, r) = (delta.len() / n, delta.len() % n);
    let mut chunks = Vec::with_capacity(n);
    let mut start = 0;
    for i in 0..n {
        let size = q + usize::from(i < r);
        chunks.push(&delta[start..start + size]);
        start += size;
    }
    chunks
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdmaxOutcome {
    pub bytes: Vec<u8>,
    /// Indices of the input that were kept.
    pub kept: Vec<usize>,
    /// Whether `bytes` passes. Only an empty result can fail: it is the
    /// assumed-passing starting point and is never tested until the end.
    pub verified: bool,
}

pub fn ddmax(session: &mut OracleSession, bytes: &[u8]) -> Result<DdmaxOutcome, DdmaxError> {
    ddmax_with(session, bytes, DdmaxRules::default())
}

pub fn ddmax_with(session: &mut OracleSession, bytes: &[u8], rules: DdmaxRules) -> Result<DdmaxOutcome, DdmaxError> {
    if session.pass_fail(bytes)? {
        return Err(DdmaxError::InputPasses);
    }
    if bytes.is_empty() {
        return Err(DdmaxError::EmptyFails);
    }
    let mut pass = CharSet::empty(bytes);
    let mut n = 2;
    'search: loop {
        let delta = pass.complement();
        if rules.base_case && delta.len() == 1 {
            break;
        }
        if n > delta.len() {
            return Err(DdmaxError::InvariantViolated {
                n,
                remaining: delta.len(),
            });
        }
        let chunks = partition(&delta, n);
        for chunk in &chunks {
            let candidate = CharSet::new(bytes, Vec::new()).without(chunk);
            if session.pass_fail(&candidate.materialize())? {
                pass = candidate;
                n = 2;
                continue 'search;
            }
        }
        for chunk in &chunks {
            let candidate = pass.with(chunk);
            if session.pass_fail(&candidate.materialize())? {
                pass = candidate;
                n = (n - 1).max(2);
                continue 'search;
            }
        }
        if n < delta.len() {
            let cap = if rules.granularity_fix { delta.len() } else { bytes.len() };
            n = cap.min(2 * n);
            continue;
        }
        break;
    }
    let out = pass.materialize();
    let verified = !pass.is_empty() || session.pass_fail(&out)?;
    Ok(DdmaxOutcome {
        bytes: out,
        kept: pass.kept,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::Format;

    fn run(format: Format, input: &[u8]) -> (DdmaxOutcome, OracleSession) {
        let mut s = OracleSession::new(format).with_query_log();
        let out = ddmax(&mut s, input).unwrap();
        (out, s)
    }

    fn strings(queries: &[Vec<u8>]) -> Vec<String> {
        queries.iter().map(|q| String::from_utf8_lossy(q).into_owned()).collect()
    }

    #[test]
    fn partition_sizes() {
        let four = [0, 1, 2, 3];
        assert_eq!(partition(&four, 2), vec![&[0, 1][..], &[2, 3]]);
        assert_eq!(partition(&four, 4).len(), 4);
        let five = [0, 1, 2, 3, 4];
        let sizes: Vec<usize> = partition(&five, 2).iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![3, 2]);
    }

    #[test]
    fn charset_ops() {
        let src = b"abcdef";
        let set = CharSet::new(src, vec![1, 4]);
        assert_eq!(set.materialize(), b"be");
        assert_eq!(set.complement(), vec![0, 2, 3, 5]);
        assert_eq!(set.with(&[0, 5]).kept(), &[0, 1, 4, 5]);
        assert_eq!(set.without(&[2, 3]).kept(), &[0, 1, 4, 5]);
    }

    #[test]
    fn multiple_faults_leave_nothing() {
        let (out, s) = run(Format::Json, b"[*]+");
        assert!(out.bytes.is_empty());
        assert!(!out.verified);
        assert_eq!(
            strings(s.queries()),
            vec!["[*]+", "]+", "[*", "[*", "]+", "*]+", "[]+", "[*+", "[*]", "[", "*", "]", "+", ""]
        );
    }

    #[test]
    fn contiguous_faults_leave_nothing() {
        let (out, s) = run(Format::Json, b"[*+]");
        assert!(out.bytes.is_empty());
        assert_eq!(
            strings(s.queries()),
            vec!["[*+]", "+]", "[*", "[*", "+]", "*+]", "[+]", "[*]", "[*+", "[", "*", "+", "]", ""]
        );
    }

    #[test]
    fn fixed_recursion_terminates() {
        let (out, s) = run(Format::Json, b"1*1");
        assert_eq!(out.bytes, b"11");
        assert!(out.verified);
        assert!(s.run_count() < 1000);
        let (out, s) = run(Format::Json, br#"{*"":2}"#);
        assert_eq!(out.bytes, br#"{"":2}"#);
        assert!(s.run_count() < 1000);
    }

    #[test]
    fn unfixed_recursion_trips_the_invariant() {
        let mut s = OracleSession::new(Format::Json);
        let no_base = DdmaxRules {
            base_case: false,
            ..DdmaxRules::default()
        };
        assert!(matches!(
            ddmax_with(&mut s, b"1*1", no_base),
            Err(DdmaxError::InvariantViolated { .. })
        ));
        let no_cap = DdmaxRules {
            granularity_fix: false,
            ..DdmaxRules::default()
        };
        assert!(matches!(
            ddmax_with(&mut s, br#"{*"":2}"#, no_cap),
            Err(DdmaxError::InvariantViolated { .. })
        ));
    }

    #[test]
    fn preconditions() {
        let mut s = OracleSession::new(Format::Json);
        assert_eq!(ddmax(&mut s, b"[]"), Err(DdmaxError::InputPasses));
        assert_eq!(ddmax(&mut s, b""), Err(DdmaxError::EmptyFails));
    }

    #[test]
    fn empty_result_passes_for_ini() {
        let mut s = OracleSession::new(Format::Ini);
        let out = ddmax(&mut s, b"[").unwrap();
        assert!(out.bytes.is_empty());
        assert!(out.verified);
    }

    #[test]
    fn budget_is_respected() {
        let mut s = OracleSession::new(Format::Json).with_budget(3);
        assert!(ddmax(&mut s, br#"{ "name": "Dave" "age": 42 }"#).unwrap_err().is_timeout());
    }
}
