use std::fmt;

use serde::{Deserialize, Serialize};

/// One single-byte repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "op", content = "byte")]
pub enum Edit {
    Delete,
    Insert(u8),
}

impl Edit {
    pub fn is_insert(self) -> bool {
        matches!(self, Edit::Insert(_))
    }
}

/// Edit kind without the inserted byte; the unit of a sampling mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EditKind {
    Delete,
    Insert,
}

impl From<Edit> for EditKind {
    fn from(edit: Edit) -> Self {
        match edit {
            Edit::Delete => EditKind::Delete,
            Edit::Insert(_) => EditKind::Insert,
        }
    }
}

/// One branch of the repair search.
///
/// `content[..boundary]` is never incorrect, and `boundary` is maximal: it is
/// either `content.len()` or the prefix one byte longer is incorrect.
/// `mask` lists the repairs applied to the original input, oldest first.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairThread {
    pub content: Vec<u8>,
    pub boundary: usize,
    pub mask: Vec<Edit>,
    /// Whether `content` as a whole classified complete when the boundary was
    /// last extended.
    pub complete: bool,
}

impl RepairThread {
    pub fn edits(&self) -> usize {
        self.mask.len()
    }

    pub fn inserts(&self) -> usize {
        self.mask.iter().filter(|e| e.is_insert()).count()
    }

    pub fn deletes(&self) -> usize {
        self.edits() - self.inserts()
    }

    /// Position of the boundary in the coordinates of the original input.
    ///
    /// Every repair happens at or before the boundary, so the original bytes
    /// consumed so far number `boundary + deletes - inserts`.
    pub fn source_position(&self) -> usize {
        (self.boundary + self.deletes()).saturating_sub(self.inserts())
    }

    pub fn kinds(&self) -> impl Iterator<Item = EditKind> + '_ {
        self.mask.iter().map(|&e| EditKind::from(e))
    }

    /// The byte just before the boundary, `None` at boundary zero.
    pub fn last_valid_byte(&self) -> Option<u8> {
        self.boundary.checked_sub(1).map(|i| self.content[i])
    }
}

impl fmt::Debug for RepairThread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepairThread")
            .field("content", &String::from_utf8_lossy(&self.content))
            .field("boundary", &self.boundary)
            .field("mask", &self.mask)
            .field("complete", &self.complete)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_position_tracks_original_offsets() {
        let t = RepairThread {
            content: br#"{"ABCD":["1,2,3,4,5,6"]*}"#.to_vec(),
            boundary: 23,
            mask: vec![Edit::Delete],
            complete: false,
        };
        assert_eq!(t.source_position(), 24);
        assert_eq!(t.last_valid_byte(), Some(b']'));
        let t = RepairThread {
            content: b"a".to_vec(),
            boundary: 0,
            mask: vec![Edit::Insert(b'x'), Edit::Delete],
            complete: false,
        };
        assert_eq!(t.last_valid_byte(), None);
        assert_eq!(t.edits(), 2);
        assert_eq!(t.inserts(), 1);
    }
}
