use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("alphabet is empty")]
    Empty,
    #[error("alphabet repeats byte 0x{0:02x}")]
    Duplicate(u8),
}

/// Ordered, duplicate-free set of bytes tried for insertion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Alphabet(Vec<u8>);

impl Alphabet {
    pub fn new(bytes: Vec<u8>) -> Result<Self, AlphabetError> {
        if bytes.is_empty() {
            return Err(AlphabetError::Empty);
        }
        let mut seen = HashSet::with_capacity(bytes.len());
        for &b in &bytes {
            if !seen.insert(b) {
                return Err(AlphabetError::Duplicate(b));
            }
        }
        Ok(Alphabet(bytes))
    }

    /// Tab, newline and printable ASCII, in ascending byte order.
    pub fn printable() -> Self {
        let mut bytes = vec![b'\t', b'\n'];
        bytes.extend(0x20..=0x7e);
        Alphabet(bytes)
    }

    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::printable()
    }
}

impl TryFrom<Vec<u8>> for Alphabet {
    type Error = AlphabetError;

    fn try_from(bytes: Vec<u8>) -> Result<Self, Self::Error> {
        Alphabet::new(bytes)
    }
}

impl From<Alphabet> for Vec<u8> {
    fn from(alphabet: Alphabet) -> Self {
        alphabet.0
    }
}

/// How a thread's edits enter its sampling key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskKey {
    /// The order of deletions and insertions matters.
    Sequence,
    /// Only the number of deletions and insertions matters.
    #[default]
    Counts,
}

/// Search parameters for [`crate::repair::repair`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepairConfig {
    /// Insert only at the boundary rather than at every prefix position.
    pub last_insert_only: bool,
    /// Threads kept per sampling key (mask kinds, boundary, last valid byte).
    pub max_num_per_mask: usize,
    pub mask_key: MaskKey,
    /// Number of distinct best boundaries kept per generation; negative
    /// disables the filter.
    pub max_simultaneous_corrections: i64,
    /// The boundary filter only runs on generations holding more than this
    /// many sampled threads.
    pub filter_above: usize,
    /// Insertion candidates, tried in order. `None` disables insertion.
    pub alphabet: Option<Alphabet>,
    pub rng_seed: u64,
    /// Generation limit; `None` means `2 * input length + 64`.
    pub max_iterations: Option<usize>,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            last_insert_only: true,
            max_num_per_mask: 5,
            mask_key: MaskKey::Counts,
            max_simultaneous_corrections: 3,
            filter_above: 0,
            alphabet: Some(Alphabet::printable()),
            rng_seed: 0,
            max_iterations: None,
        }
    }
}

impl RepairConfig {
    /// Deletion only.
    pub fn delete_only() -> Self {
        RepairConfig {
            alphabet: None,
            ..RepairConfig::default()
        }
    }

    pub fn iteration_limit(&self, input_len: usize) -> usize {
        self.max_iterations.unwrap_or(2 * input_len + 64)
    }

    pub fn insert_bytes(&self) -> &[u8] {
        self.alphabet.as_ref().map_or(&[], Alphabet::bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_validation() {
        assert_eq!(Alphabet::new(vec![]), Err(AlphabetError::Empty));
        assert_eq!(Alphabet::new(vec![b'a', b'b', b'a']), Err(AlphabetError::Duplicate(b'a')));
        let a = Alphabet::printable();
        assert_eq!(a.len(), 97);
        assert!(a.bytes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn config_deserializes_with_defaults() {
        let cfg: RepairConfig = serde_json::from_str(r#"{"rng_seed": 9}"#).unwrap();
        assert_eq!(cfg.rng_seed, 9);
        assert_eq!(cfg.max_num_per_mask, 5);
        assert!(serde_json::from_str::<RepairConfig>(r#"{"alphabet": []}"#).is_err());
    }
}
