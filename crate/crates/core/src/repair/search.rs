//! Boundary discovery: binary search for the first repair and after a
//! deletion, linear search after an insertion.

use crate::oracle::{OracleError, OracleSession, PrefixProbe, Scanner};

/// A boundary plus, when the boundary reached the end and the whole content
/// was queried on the way, whether that content was complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Extent {
    pub boundary: usize,
    pub complete: Option<bool>,
}

/// Largest `b` in `[lo, bytes.len()]` whose prefix is not incorrect.
///
/// Requires `bytes[..lo]` to be non-incorrect and incorrectness to be
/// prefix-monotone. Uses at most `1 + ceil(log2(len - lo))` queries.
///
/// The result is a prefix length: for `{"ABCD":[*` it is 9, so the offending
/// byte is `bytes[9]`.
pub fn binary_search(session: &mut OracleSession, bytes: &[u8], lo: usize) -> Result<usize, OracleError> {
    let probe = PrefixProbe::from_start(session, bytes);
    Ok(bsearch(session, &probe, bytes.len(), lo)?.boundary)
}

pub(crate) fn bsearch(
    session: &mut OracleSession,
    probe: &PrefixProbe<'_>,
    len: usize,
    lo: usize,
) -> Result<Extent, OracleError> {
    if lo >= len {
        return Ok(Extent {
            boundary: len,
            complete: None,
        });
    }
    let whole = probe.probe(session, len)?;
    if !whole.is_incorrect() {
        return Ok(Extent {
            boundary: len,
            complete: Some(whole.is_complete()),
        });
    }
    // Invariant: prefix `good` is not incorrect, prefix `bad` is.
    let (mut good, mut bad) = (lo, len);
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if probe.probe(session, mid)?.is_incorrect() {
            bad = mid;
        } else {
            good = mid;
        }
    }
    Ok(Extent {
        boundary: good,
        complete: None,
    })
}

/// Extends one byte at a time from `start`, where `scanner` holds the state
/// after `content[..start]`. Each extension step is one query.
pub(crate) fn lsearch(
    session: &mut OracleSession,
    content: &[u8],
    mut scanner: Box<dyn Scanner>,
    start: usize,
) -> Result<Extent, OracleError> {
    let mut boundary = start;
    while boundary < content.len() {
        session.charge(&content[..=boundary])?;
        if !scanner.push(content[boundary]) {
            return Ok(Extent {
                boundary,
                complete: None,
            });
        }
        boundary += 1;
    }
    let complete = (boundary > start).then(|| scanner.verdict().is_complete());
    Ok(Extent { boundary, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::Format;

    fn boundary(format: Format, bytes: &[u8]) -> usize {
        binary_search(&mut OracleSession::new(format), bytes, 0).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(boundary(Format::Json, br#"{"ABCD":[*"1,2,3,4,5,6"]*}"#), 9);
        assert_eq!(boundary(Format::Json, b"[]"), 2);
        assert_eq!(boundary(Format::Json, b"]x"), 0);
        assert_eq!(boundary(Format::Json, br#"{ "name": "Dave" "age": 42 }"#), 17);
    }

    #[test]
    fn starts_from_lower_bound() {
        let bytes = br#"{"ABCD":["1,2,3,4,5,6"]*}"#;
        let mut s = OracleSession::new(Format::Json);
        assert_eq!(binary_search(&mut s, bytes, 9).unwrap(), 23);
        let mut s = OracleSession::new(Format::Json);
        assert_eq!(binary_search(&mut s, bytes, bytes.len()).unwrap(), bytes.len());
        assert_eq!(s.run_count(), 0);
    }

    #[test]
    fn linear_search_reports_completion() {
        let content = b"[1, 2]";
        let mut s = OracleSession::new(Format::Json);
        let mut scanner = s.scanner();
        scanner.push_all(b"[1");
        let ext = lsearch(&mut s, content, scanner, 2).unwrap();
        assert_eq!(ext, Extent { boundary: 6, complete: Some(true) });
        assert_eq!(s.run_count(), 4);

        let content = b"[1 2]";
        let mut s = OracleSession::new(Format::Json);
        let mut scanner = s.scanner();
        scanner.push_all(b"[1");
        let ext = lsearch(&mut s, content, scanner, 2).unwrap();
        assert_eq!(ext, Extent { boundary: 3, complete: None });
    }
}
