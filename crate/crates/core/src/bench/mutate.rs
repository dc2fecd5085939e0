use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::Format;
use crate::oracle::FormatOracle;

/// Draws of a full mutation sequence before giving up.
pub const MAX_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationKind {
    ByteFlip,
    Insert,
    Delete,
}

/// One applied mutation. `position` indexes the buffer as it was when this
/// mutation was applied, after the earlier ones in the same sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationSpec {
    pub kind: MutationKind,
    pub position: usize,
    /// New byte for flips and insertions.
    pub byte: Option<u8>,
    pub seed: u64,
}

impl MutationSpec {
    pub fn apply(&self, bytes: &mut Vec<u8>) {
        match self.kind {
            MutationKind::ByteFlip => bytes[self.position] = self.byte.expect("flip carries a byte"),
            MutationKind::Insert => bytes.insert(self.position, self.byte.expect("insert carries a byte")),
            MutationKind::Delete => {
                bytes.remove(self.position);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutateError {
    #[error("cannot mutate an empty input")]
    EmptyInput,
    #[error("at least one mutation is required")]
    NoMutations,
    #[error("no invalid mutant in {0} draws")]
    Unmutatable(usize),
}

fn draw(rng: &mut ChaCha8Rng, len: usize, seed: u64) -> MutationSpec {
    let kind = if len == 0 {
        MutationKind::Insert
    } else {
        [MutationKind::ByteFlip, MutationKind::Insert, MutationKind::Delete][rng.gen_range(0..3)]
    };
    match kind {
        MutationKind::ByteFlip => MutationSpec {
            kind,
            position: rng.gen_range(0..len),
            // Offset resolved against the current byte in `mutate`.
            byte: Some(rng.gen_range(1..=255)),
            seed,
        },
        MutationKind::Insert => MutationSpec {
            kind,
            position: rng.gen_range(0..=len),
            byte: Some(rng.gen()),
            seed,
        },
        MutationKind::Delete => MutationSpec {
            kind,
            position: rng.gen_range(0..len),
            byte: None,
            seed,
        },
    }
}

/// Applies `n` random byte flips, insertions and deletions, with kind and
/// position drawn uniformly. The whole sequence is redrawn until the result
/// no longer parses as a complete `format` document.
pub fn mutate(format: Format, bytes: &[u8], n: usize, seed: u64) -> Result<(Vec<u8>, Vec<MutationSpec>), MutateError> {
    mutate_with(format.oracle().as_ref(), bytes, n, seed)
}

pub fn mutate_with(
    oracle: &dyn FormatOracle,
    bytes: &[u8],
    n: usize,
    seed: u64,
) -> Result<(Vec<u8>, Vec<MutationSpec>), MutateError> {
    if bytes.is_empty() {
        return Err(MutateError::EmptyInput);
    }
    if n == 0 {
        return Err(MutateError::NoMutations);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let mut out = bytes.to_vec();
        let mut specs = Vec::with_capacity(n);
        for _ in 0..n {
            let mut spec = draw(&mut rng, out.len(), seed);
            if spec.kind == MutationKind::ByteFlip {
                // A flip always changes the byte.
                let offset = spec.byte.unwrap_or(1);
                spec.byte = Some(out[spec.position].wrapping_add(offset));
            }
            spec.apply(&mut out);
            specs.push(spec);
        }
        if !oracle.classify(&out).is_complete() {
            return Ok((out, specs));
        }
    }
    Err(MutateError::Unmutatable(MAX_DRAWS))
}
