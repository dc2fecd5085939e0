//! The repair engine.
//!
//! A repair starts by locating the parse boundary of the corrupt input with
//! a binary search. From there it runs generations of repair threads: every
//! thread is repaired at its boundary by deleting the offending byte or by
//! inserting a byte from the alphabet, each child is extended to its new
//! boundary, redundant children are sampled away, and the loop stops at the
//! first generation that produces a complete input.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::oracle::{OracleError, OracleSession, PrefixProbe, Scanner};

mod config;
mod search;
mod thread;

pub use config::{Alphabet, AlphabetError, MaskKey, RepairConfig};
pub use search::binary_search;
pub use thread::{Edit, EditKind, RepairThread};

use search::{bsearch, lsearch, Extent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("boundary is at the end of the input; nothing to delete")]
    NothingToDelete,
    #[error("no complete repair within {0} generations")]
    IterationLimit(usize),
    #[error("no repair thread left to extend")]
    Exhausted,
}

impl RepairError {
    /// Budget and deadline failures, as opposed to a search that ran dry.
    pub fn is_timeout(&self) -> bool {
        matches!(self, RepairError::Oracle(_))
    }
}

/// Scanner state after `content[..len]`.
fn checkpoint(session: &OracleSession, content: &[u8], len: usize) -> Box<dyn Scanner> {
    let mut scanner = session.scanner();
    scanner.push_all(&content[..len]);
    scanner
}

fn with_extent(content: Vec<u8>, mask: Vec<Edit>, extent: Extent) -> RepairThread {
    RepairThread {
        content,
        boundary: extent.boundary,
        mask,
        complete: extent.complete.unwrap_or(false),
    }
}

/// Fills in `complete` for a thread whose boundary reached the end without
/// the whole content having been queried yet.
fn settle(session: &mut OracleSession, mut thread: RepairThread, extent: Extent) -> Result<RepairThread, OracleError> {
    if extent.boundary == thread.content.len() && extent.complete.is_none() {
        thread.complete = session.feedback(&thread.content)?.is_complete();
    }
    Ok(thread)
}

/// Removes the byte at the boundary and re-extends with binary search.
///
/// The child is kept even when its boundary does not move.
pub fn apply_delete(session: &mut OracleSession, thread: &RepairThread) -> Result<RepairThread, RepairError> {
    let at = checkpoint(session, &thread.content, thread.boundary);
    delete_from(session, thread, at)
}

fn delete_from(
    session: &mut OracleSession,
    thread: &RepairThread,
    at_boundary: Box<dyn Scanner>,
) -> Result<RepairThread, RepairError> {
    let b = thread.boundary;
    if b >= thread.content.len() {
        return Err(RepairError::NothingToDelete);
    }
    let mut content = Vec::with_capacity(thread.content.len() - 1);
    content.extend_from_slice(&thread.content[..b]);
    content.extend_from_slice(&thread.content[b + 1..]);
    let probe = PrefixProbe::new(&content, at_boundary, b);
    let extent = bsearch(session, &probe, content.len(), b)?;
    let mut mask = thread.mask.clone();
    mask.push(Edit::Delete);
    let child = with_extent(content, mask, extent);
    Ok(settle(session, child, extent)?)
}

/// Inserts `byte` at `k` (at most the boundary) and extends the boundary by
/// linear search. Returns `None` unless the new boundary passes `k`.
pub fn insert_at(
    session: &mut OracleSession,
    thread: &RepairThread,
    k: usize,
    byte: u8,
) -> Result<Option<RepairThread>, OracleError> {
    assert!(k <= thread.boundary, "insertion point {k} beyond boundary {}", thread.boundary);
    let at = checkpoint(session, &thread.content, k);
    insert_from(session, thread, k, byte, at)
}

fn insert_from(
    session: &mut OracleSession,
    thread: &RepairThread,
    k: usize,
    byte: u8,
    at_k: Box<dyn Scanner>,
) -> Result<Option<RepairThread>, OracleError> {
    let mut content = Vec::with_capacity(thread.content.len() + 1);
    content.extend_from_slice(&thread.content[..k]);
    content.push(byte);
    content.extend_from_slice(&thread.content[k..]);
    let extent = lsearch(session, &content, at_k, k)?;
    if extent.boundary <= k {
        return Ok(None);
    }
    let mut mask = thread.mask.clone();
    mask.push(Edit::Insert(byte));
    let child = with_extent(content, mask, extent);
    Ok(Some(settle(session, child, extent)?))
}

/// Every accepted insertion of `byte`: at the boundary only, or at every
/// position up to and including it.
pub fn insert_char(
    session: &mut OracleSession,
    thread: &RepairThread,
    byte: u8,
    cfg: &RepairConfig,
) -> Result<Vec<RepairThread>, OracleError> {
    let mut out = Vec::new();
    if cfg.last_insert_only {
        let at = checkpoint(session, &thread.content, thread.boundary);
        out.extend(insert_from(session, thread, thread.boundary, byte, at)?);
    } else {
        let mut at = session.scanner();
        for k in 0..=thread.boundary {
            out.extend(insert_from(session, thread, k, byte, at.clone())?);
            if k < thread.boundary {
                at.push(thread.content[k]);
            }
        }
    }
    Ok(out)
}

/// The delete child, if there is a byte at the boundary, followed by every
/// accepted insertion in alphabet order.
pub fn repair_and_extend(
    session: &mut OracleSession,
    thread: &RepairThread,
    cfg: &RepairConfig,
) -> Result<Vec<RepairThread>, OracleError> {
    let mut children = Vec::new();
    let at = checkpoint(session, &thread.content, thread.boundary);
    match delete_from(session, thread, at.clone()) {
        Ok(child) => children.push(child),
        Err(RepairError::NothingToDelete) => {}
        Err(RepairError::Oracle(e)) => return Err(e),
        Err(other) => unreachable!("delete step failed with {other}"),
    }
    for &byte in cfg.insert_bytes() {
        if cfg.last_insert_only {
            children.extend(insert_from(session, thread, thread.boundary, byte, at.clone())?);
        } else {
            children.extend(insert_char(session, thread, byte, cfg)?);
        }
    }
    Ok(children)
}

type SampleKey = (Vec<EditKind>, usize, Option<u8>);

fn sample_key(thread: &RepairThread, mask_key: MaskKey) -> SampleKey {
    let kinds = match mask_key {
        MaskKey::Sequence => thread.kinds().collect(),
        // Deletes then inserts: order-free, so only the counts differ.
        MaskKey::Counts => {
            let mut kinds: Vec<EditKind> = thread.kinds().collect();
            kinds.sort_unstable();
            kinds
        }
    };
    (kinds, thread.boundary, thread.last_valid_byte())
}

/// Per-key reservoir of threads, fed in discovery order. A thread whose
/// content repeats an earlier one is redundant (the boundary follows from
/// the content) and is dropped.
struct Sampler {
    per_key: usize,
    mask_key: MaskKey,
    groups: Vec<(usize, Vec<(usize, RepairThread)>)>,
    index: HashMap<SampleKey, usize>,
    contents: HashSet<Vec<u8>>,
    offered: usize,
}

impl Sampler {
    fn new(cfg: &RepairConfig) -> Self {
        Sampler {
            per_key: cfg.max_num_per_mask.max(1),
            mask_key: cfg.mask_key,
            groups: Vec::new(),
            index: HashMap::new(),
            contents: HashSet::new(),
            offered: 0,
        }
    }

    /// Returns false for a duplicate.
    fn offer(&mut self, thread: RepairThread, rng: &mut ChaCha8Rng) -> bool {
        if !self.contents.insert(thread.content.clone()) {
            return false;
        }
        let order = self.offered;
        self.offered += 1;
        let slot = *self.index.entry(sample_key(&thread, self.mask_key)).or_insert_with(|| {
            self.groups.push((0, Vec::new()));
            self.groups.len() - 1
        });
        let (seen, kept) = &mut self.groups[slot];
        if kept.len() < self.per_key {
            kept.push((order, thread));
        } else {
            let j = rng.gen_range(0..=*seen);
            if j < self.per_key {
                kept[j] = (order, thread);
            }
        }
        *seen += 1;
        true
    }

    /// Survivors grouped by key in order of first appearance, discovery order
    /// within a group.
    fn finish(self) -> Vec<RepairThread> {
        let mut out = Vec::new();
        for (_, mut kept) in self.groups {
            kept.sort_by_key(|(order, _)| *order);
            out.extend(kept.into_iter().map(|(_, t)| t));
        }
        out
    }
}

/// Drops threads with repeated content, keeps at most `max_num_per_mask`
/// threads per (mask kinds, boundary, last valid byte), chosen uniformly
/// with `rng`, then applies [`filter_best`] when more than `filter_above`
/// threads remain.
pub fn sample_threads(threads: Vec<RepairThread>, cfg: &RepairConfig, rng: &mut ChaCha8Rng) -> Vec<RepairThread> {
    let mut sampler = Sampler::new(cfg);
    for t in threads {
        sampler.offer(t, rng);
    }
    narrow(sampler.finish(), cfg)
}

fn narrow(sampled: Vec<RepairThread>, cfg: &RepairConfig) -> Vec<RepairThread> {
    if sampled.len() > cfg.filter_above {
        filter_best(sampled, cfg)
    } else {
        sampled
    }
}

/// Keeps the threads whose boundary is among the `max_simultaneous_corrections`
/// largest distinct boundaries. Identity when that limit is negative.
///
/// Boundaries are compared as [`RepairThread::source_position`], so that
/// progress means consuming more of the original input: an inserted byte
/// that merely parses does not outrank deleting a bad one.
pub fn filter_best(threads: Vec<RepairThread>, cfg: &RepairConfig) -> Vec<RepairThread> {
    let Ok(keep) = usize::try_from(cfg.max_simultaneous_corrections) else {
        return threads;
    };
    if keep == 0 {
        return Vec::new();
    }
    let mut boundaries: Vec<usize> = threads.iter().map(RepairThread::source_position).collect();
    boundaries.sort_unstable_by(|a, b| b.cmp(a));
    boundaries.dedup();
    let Some(&cutoff) = boundaries.get(keep - 1) else {
        return threads;
    };
    threads.into_iter().filter(|t| t.source_position() >= cutoff).collect()
}

/// Runs repair generations from a thread at `boundary` until one generation
/// yields complete inputs, and returns those. All returned threads share
/// the same edit count and keep their discovery order: the delete child of
/// a thread precedes its insert children, which follow alphabet order.
pub fn find_fixes(
    session: &mut OracleSession,
    bytes: &[u8],
    boundary: usize,
    cfg: &RepairConfig,
) -> Result<Vec<RepairThread>, RepairError> {
    find_fixes_observed(session, bytes, boundary, cfg, &mut |_, _| {})
}

/// [`find_fixes`] that reports every thread it creates, with its generation.
pub fn find_fixes_observed(
    session: &mut OracleSession,
    bytes: &[u8],
    boundary: usize,
    cfg: &RepairConfig,
    observer: &mut dyn FnMut(usize, &RepairThread),
) -> Result<Vec<RepairThread>, RepairError> {
    let extent = Extent {
        boundary,
        complete: None,
    };
    let root = settle(session, with_extent(bytes.to_vec(), Vec::new(), extent), extent)?;
    run_generations(session, root, cfg, observer)
}

fn run_generations(
    session: &mut OracleSession,
    root: RepairThread,
    cfg: &RepairConfig,
    observer: &mut dyn FnMut(usize, &RepairThread),
) -> Result<Vec<RepairThread>, RepairError> {
    observer(0, &root);
    if root.complete {
        return Ok(vec![root]);
    }
    let limit = cfg.iteration_limit(root.content.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut frontier = vec![root];
    for generation in 1..=limit {
        let mut next = Sampler::new(cfg);
        let mut completed = Vec::new();
        for parent in &frontier {
            for child in repair_and_extend(session, parent, cfg)? {
                observer(generation, &child);
                let done = child.complete.then(|| child.clone());
                if next.offer(child, &mut rng) {
                    completed.extend(done);
                }
            }
        }
        if !completed.is_empty() {
            return Ok(completed);
        }
        frontier = narrow(next.finish(), cfg);
        if frontier.is_empty() {
            return Err(RepairError::Exhausted);
        }
    }
    Err(RepairError::IterationLimit(limit))
}

/// Binary search for the boundary, then [`find_fixes`].
pub fn repair(session: &mut OracleSession, bytes: &[u8], cfg: &RepairConfig) -> Result<Vec<RepairThread>, RepairError> {
    repair_observed(session, bytes, cfg, &mut |_, _| {})
}

pub fn repair_observed(
    session: &mut OracleSession,
    bytes: &[u8],
    cfg: &RepairConfig,
    observer: &mut dyn FnMut(usize, &RepairThread),
) -> Result<Vec<RepairThread>, RepairError> {
    let probe = PrefixProbe::from_start(session, bytes);
    let extent = bsearch(session, &probe, bytes.len(), 0)?;
    let root = settle(session, with_extent(bytes.to_vec(), Vec::new(), extent), extent)?;
    run_generations(session, root, cfg, observer)
}
