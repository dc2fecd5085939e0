use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Edit distances above this are not computed exactly.
pub const DEFAULT_CAP: usize = 750;

const EXCEEDED: &str = "exceeded-threshold";

/// Levenshtein distance, or `Exceeded` when it is larger than the cap.
/// Serializes as a number or as the string `"exceeded-threshold"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EditDistance {
    Exact(usize),
    Exceeded,
}

impl EditDistance {
    pub fn exact(self) -> Option<usize> {
        match self {
            EditDistance::Exact(d) => Some(d),
            EditDistance::Exceeded => None,
        }
    }
}

impl fmt::Display for EditDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditDistance::Exact(d) => write!(f, "{d}"),
            EditDistance::Exceeded => f.write_str(EXCEEDED),
        }
    }
}

impl Serialize for EditDistance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            EditDistance::Exact(d) => s.serialize_u64(*d as u64),
            EditDistance::Exceeded => s.serialize_str(EXCEEDED),
        }
    }
}

impl<'de> Deserialize<'de> for EditDistance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(n) => Ok(EditDistance::Exact(n)),
            Raw::Text(t) if t == EXCEEDED => Ok(EditDistance::Exceeded),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("unexpected edit distance {t:?}"))),
        }
    }
}

/// Unit-cost edit distance between `a` and `b`, computed only inside the
/// diagonal band of half-width `cap`: O(len * cap) time.
pub fn levenshtein(a: &[u8], b: &[u8], cap: usize) -> EditDistance {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if b.len() - a.len() > cap {
        return EditDistance::Exceeded;
    }
    // Anything above cap is clamped to cap + 1, which keeps the band sound.
    let over = cap + 1;
    let mut prev: Vec<usize> = (0..=b.len()).map(|j| j.min(over)).collect();
    let mut cur = vec![over; b.len() + 1];
    for i in 1..=a.len() {
        let lo = i.saturating_sub(cap).max(1);
        let hi = (i + cap).min(b.len());
        cur[lo - 1] = if lo == 1 { i.min(over) } else { over };
        let mut row_min = cur[lo - 1];
        for j in lo..=hi {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let v = sub.min(prev[j] + 1).min(cur[j - 1] + 1).min(over);
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if hi < b.len() {
            cur[hi + 1] = over;
        }
        if row_min > cap {
            return EditDistance::Exceeded;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    match prev[b.len()] {
        d if d <= cap => EditDistance::Exact(d),
        _ => EditDistance::Exceeded,
    }
}

/// Repaired size as a percentage of the original valid size. Exceeds 100
/// when the repair synthesized more bytes than were lost.
pub fn recovery_pct(repaired: &[u8], original: &[u8]) -> f64 {
    assert!(!original.is_empty(), "original must be non-empty");
    100.0 * repaired.len() as f64 / original.len() as f64
}
