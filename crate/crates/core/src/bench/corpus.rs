//! On-disk mutation corpora:
//!
//! ```text
//! <root>/<format>/valid/NNN.bin
//! <root>/<format>/single/NNN.bin   + NNN.meta.json
//! <root>/<format>/multi/NNN.bin    + NNN.meta.json
//! ```
//!
//! Each mutant's sidecar names its origin in `valid/` and the mutations that
//! produced it.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::generate::generate;
use super::mutate::{mutate, MutationSpec};
use crate::formats::Format;

/// How mutation positions are chosen; recorded in every sidecar.
pub const POSITION_SAMPLING: &str = "uniform";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: bad sidecar: {source}")]
    Meta {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutantSet {
    Single,
    Multi,
}

impl MutantSet {
    pub fn dir(self) -> &'static str {
        match self {
            MutantSet::Single => "single",
            MutantSet::Multi => "multi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantMeta {
    pub format: Format,
    /// Path of the valid file, relative to the format directory.
    pub origin: String,
    pub seed: u64,
    pub n_mutations: usize,
    pub position_sampling: String,
    pub mutations: Vec<MutationSpec>,
}

/// A mutant ready to benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    /// `<format>/<set>/<stem>`.
    pub id: String,
    pub format: Format,
    pub set: MutantSet,
    pub bytes: Vec<u8>,
    /// The valid file the mutant came from, when its sidecar names one.
    pub original: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSpec {
    pub formats: Vec<Format>,
    pub per_format: usize,
    pub seed: u64,
    pub min_len: usize,
    pub max_len: usize,
    pub multi_range: (usize, usize),
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            formats: Format::ALL.to_vec(),
            per_format: 50,
            seed: 1,
            min_len: 50,
            max_len: 300,
            multi_range: (2, 16),
        }
    }
}

/// A generated valid file with its two mutants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFile {
    pub format: Format,
    pub index: usize,
    pub valid: Vec<u8>,
    pub single: (Vec<u8>, MutantMeta),
    pub multi: (Vec<u8>, MutantMeta),
}

fn stem(index: usize) -> String {
    format!("{index:03}")
}

/// Generates the corpus in memory. Each format draws from its own stream, so
/// adding a format leaves the others unchanged.
pub fn generate_corpus(spec: &CorpusSpec) -> Vec<GeneratedFile> {
    let mut files = Vec::new();
    for &format in &spec.formats {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(format as u64);
        let mut index = 0;
        while index < spec.per_format {
            let valid = generate(format, &mut rng, spec.min_len, spec.max_len);
            let single_seed: u64 = rng.gen();
            let multi_seed: u64 = rng.gen();
            let n = rng.gen_range(spec.multi_range.0..=spec.multi_range.1);
            let (Ok(single), Ok(multi)) = (mutate(format, &valid, 1, single_seed), mutate(format, &valid, n, multi_seed))
            else {
                continue;
            };
            let meta = |seed, n_mutations, mutations| MutantMeta {
                format,
                origin: format!("valid/{}.bin", stem(index)),
                seed,
                n_mutations,
                position_sampling: POSITION_SAMPLING.to_string(),
                mutations,
            };
            files.push(GeneratedFile {
                format,
                index,
                single: (single.0, meta(single_seed, 1, single.1)),
                multi: (multi.0, meta(multi_seed, n, multi.1)),
                valid,
            });
            index += 1;
        }
    }
    files
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn write_corpus(root: &Path, files: &[GeneratedFile]) -> Result<(), CorpusError> {
    for f in files {
        let dir = root.join(f.format.name());
        for sub in ["valid", "single", "multi"] {
            let d = dir.join(sub);
            fs::create_dir_all(&d).map_err(io_err(&d))?;
        }
        let name = stem(f.index);
        write(&dir.join("valid").join(format!("{name}.bin")), &f.valid)?;
        for (set, (bytes, meta)) in [(MutantSet::Single, &f.single), (MutantSet::Multi, &f.multi)] {
            let base = dir.join(set.dir());
            write(&base.join(format!("{name}.bin")), bytes)?;
            let mut json = serde_json::to_vec_pretty(meta).expect("sidecar serializes");
            json.push(b'\n');
            write(&base.join(format!("{name}.meta.json")), &json)?;
        }
    }
    Ok(())
}

fn sorted_bins(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.extension().is_some_and(|e| e == "bin") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Loads every single and multi mutant under `root`, sorted by id.
/// Directories not named after a format are ignored, as are missing sets.
pub fn load_corpus(root: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    for format in Format::ALL {
        let dir = root.join(format.name());
        for set in [MutantSet::Single, MutantSet::Multi] {
            let set_dir = dir.join(set.dir());
            if !set_dir.is_dir() {
                continue;
            }
            for path in sorted_bins(&set_dir)? {
                let bytes = fs::read(&path).map_err(io_err(&path))?;
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                let meta_path = set_dir.join(format!("{stem}.meta.json"));
                let original = if meta_path.is_file() {
                    let raw = fs::read(&meta_path).map_err(io_err(&meta_path))?;
                    let meta: MutantMeta = serde_json::from_slice(&raw).map_err(|source| CorpusError::Meta {
                        path: meta_path.clone(),
                        source,
                    })?;
                    let origin = dir.join(&meta.origin);
                    Some(fs::read(&origin).map_err(io_err(&origin))?)
                } else {
                    None
                };
                entries.push(CorpusEntry {
                    id: format!("{}/{}/{stem}", format.name(), set.dir()),
                    format,
                    set,
                    bytes,
                    original,
                });
            }
        }
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(entries)
}
