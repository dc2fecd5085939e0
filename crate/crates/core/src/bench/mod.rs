//! Mutation corpora, repair metrics and the benchmark runner.

pub mod corpus;
pub mod generate;
pub mod metrics;
pub mod mutate;
pub mod run;

pub use corpus::{generate_corpus, load_corpus, write_corpus, CorpusEntry, CorpusError, CorpusSpec, MutantMeta, MutantSet};
pub use generate::generate;
pub use metrics::{levenshtein, recovery_pct, EditDistance, DEFAULT_CAP};
pub use mutate::{mutate, mutate_with, MutateError, MutationKind, MutationSpec};
pub use run::{run_bench, run_one, BenchConfig, BenchOutcome, RepairReport, Status, Strategy, Summary, SummaryRow};
