use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::corpus::CorpusEntry;
use super::metrics::{levenshtein, recovery_pct, EditDistance, DEFAULT_CAP};
use crate::ddmax::ddmax;
use crate::formats::Format;
use crate::oracle::OracleSession;
use crate::repair::{repair, RepairConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Fsynth,
    Ddmax,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Fsynth, Strategy::Ddmax];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Fsynth => "fsynth",
            Strategy::Ddmax => "ddmax",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy {0:?} (expected fsynth or ddmax)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    Repaired,
    Timeout,
    Failed,
}

/// One line of the benchmark report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairReport {
    pub file_id: String,
    pub format: Format,
    pub strategy: Strategy,
    pub status: Status,
    /// Corrupt input to repair; `None` unless repaired.
    pub edit_distance: Option<EditDistance>,
    /// `None` unless repaired and the original is known.
    pub recovery_pct: Option<f64>,
    pub oracle_runs: u64,
    pub wall_ms: u64,
    /// Repair to the original valid file, a stricter recovery signal.
    pub edit_distance_to_original: Option<EditDistance>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub repair: RepairConfig,
    /// Wall-clock limit per file and strategy.
    pub timeout: Duration,
    /// Oracle-run limit per file and strategy. Unlike the wall clock it
    /// keeps reports reproducible, so it should bind first.
    pub oracle_budget: Option<u64>,
    pub cap: usize,
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repair: RepairConfig::default(),
            timeout: Duration::from_secs(60),
            oracle_budget: Some(5_000_000),
            cap: DEFAULT_CAP,
            jobs: 1,
        }
    }
}

/// A report plus the repaired bytes it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub report: RepairReport,
    pub repaired: Option<Vec<u8>>,
}

pub fn run_one(entry: &CorpusEntry, strategy: Strategy, cfg: &BenchConfig) -> BenchOutcome {
    let start = Instant::now();
    let mut session = OracleSession::new(entry.format).with_deadline(start + cfg.timeout);
    if let Some(budget) = cfg.oracle_budget {
        session = session.with_budget(budget);
    }
    let (status, repaired) = match strategy {
        Strategy::Fsynth => match repair(&mut session, &entry.bytes, &cfg.repair) {
            Ok(mut fixes) => (Status::Repaired, Some(fixes.swap_remove(0).content)),
            Err(e) if e.is_timeout() => (Status::Timeout, None),
            Err(_) => (Status::Failed, None),
        },
        Strategy::Ddmax => match ddmax(&mut session, &entry.bytes) {
            Ok(out) if out.verified => (Status::Repaired, Some(out.bytes)),
            Ok(_) => (Status::Failed, None),
            Err(e) if e.is_timeout() => (Status::Timeout, None),
            Err(_) => (Status::Failed, None),
        },
    };
    let wall_ms = start.elapsed().as_millis() as u64;
    let fixed = repaired.as_deref();
    let report = RepairReport {
        file_id: entry.id.clone(),
        format: entry.format,
        strategy,
        status,
        edit_distance: fixed.map(|r| levenshtein(&entry.bytes, r, cfg.cap)),
        recovery_pct: fixed.zip(entry.original.as_deref()).map(|(r, o)| recovery_pct(r, o)),
        oracle_runs: session.run_count(),
        wall_ms,
        edit_distance_to_original: fixed.zip(entry.original.as_deref()).map(|(r, o)| levenshtein(r, o, cfg.cap)),
    };
    BenchOutcome { report, repaired }
}

/// Runs every strategy on every entry on `cfg.jobs` worker threads. The
/// result is ordered by file id, then strategy.
pub fn run_bench(entries: &[CorpusEntry], strategies: &[Strategy], cfg: &BenchConfig) -> Vec<BenchOutcome> {
    let jobs: Vec<(&CorpusEntry, Strategy)> = entries
        .iter()
        .flat_map(|e| strategies.iter().map(move |&s| (e, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .expect("thread pool");
    let mut out: Vec<BenchOutcome> = pool.install(|| jobs.par_iter().map(|&(e, s)| run_one(e, s, cfg)).collect());
    out.sort_by(|a, b| {
        (&a.report.file_id, a.report.strategy).cmp(&(&b.report.file_id, b.report.strategy))
    });
    out
}

/// Per format and strategy totals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryRow {
    pub files: usize,
    pub repaired: usize,
    pub timeout: usize,
    pub failed: usize,
    pub mean_recovery_pct: Option<f64>,
    pub mean_edit_distance: Option<f64>,
    pub mean_oracle_runs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub rows: BTreeMap<(Format, Strategy), SummaryRow>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl Summary {
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a RepairReport>) -> Self {
        let mut grouped: BTreeMap<(Format, Strategy), Vec<&RepairReport>> = BTreeMap::new();
        for r in reports {
            grouped.entry((r.format, r.strategy)).or_default().push(r);
        }
        let rows = grouped
            .into_iter()
            .map(|(key, rs)| {
                let count = |s: Status| rs.iter().filter(|r| r.status == s).count();
                let row = SummaryRow {
                    files: rs.len(),
                    repaired: count(Status::Repaired),
                    timeout: count(Status::Timeout),
                    failed: count(Status::Failed),
                    mean_recovery_pct: mean(rs.iter().filter_map(|r| r.recovery_pct)),
                    mean_edit_distance: mean(
                        rs.iter()
                            .filter_map(|r| r.edit_distance.and_then(EditDistance::exact))
                            .map(|d| d as f64),
                    ),
                    mean_oracle_runs: mean(rs.iter().map(|r| r.oracle_runs as f64)).unwrap_or(0.0),
                };
                (key, row)
            })
            .collect();
        Summary { rows }
    }

    pub fn repaired(&self, format: Format, strategy: Strategy) -> usize {
        self.rows.get(&(format, strategy)).map_or(0, |r| r.repaired)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<6} {:<8} {:>5} {:>8} {:>7} {:>6} {:>9} {:>8} {:>11}",
            "format", "strategy", "files", "repaired", "timeout", "failed", "recovery%", "edit", "oracle-runs"
        )?;
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
        for ((format, strategy), r) in &self.rows {
            writeln!(
                f,
                "{:<6} {:<8} {:>5} {:>8} {:>7} {:>6} {:>9} {:>8} {:>11.0}",
                format.name(),
                strategy.name(),
                r.files,
                r.repaired,
                r.timeout,
                r.failed,
                opt(r.mean_recovery_pct),
                opt(r.mean_edit_distance),
                r.mean_oracle_runs
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::corpus::MutantSet;

    fn entry(format: Format, bytes: &[u8], original: Option<&[u8]>) -> CorpusEntry {
        CorpusEntry {
            id: format!("{}/single/000", format.name()),
            format,
            set: MutantSet::Single,
            bytes: bytes.to_vec(),
            original: original.map(<[u8]>::to_vec),
        }
    }

    #[test]
    fn multi_fault_fixture() {
        let e = entry(Format::Json, b"[*]+", Some(b"[]"));
        let out = run_bench(&[e], &Strategy::ALL, &BenchConfig::default());
        assert_eq!(out.len(), 2);
        let (fs, dd) = (&out[0], &out[1]);
        assert_eq!(fs.report.strategy, Strategy::Fsynth);
        assert_eq!(fs.report.status, Status::Repaired);
        assert_eq!(fs.repaired.as_deref(), Some(&b"[]"[..]));
        assert_eq!(fs.report.recovery_pct, Some(100.0));
        assert_eq!(fs.report.edit_distance, Some(EditDistance::Exact(2)));
        // DDMax shrinks to nothing, which is not a JSON document.
        assert_eq!(dd.report.status, Status::Failed);
        assert_eq!(dd.repaired, None);
    }

    #[test]
    fn budget_reports_timeout() {
        let cfg = BenchConfig {
            oracle_budget: Some(3),
            ..BenchConfig::default()
        };
        let e = entry(Format::Json, br#"{ "name": "Dave" "age": 42 }"#, None);
        for s in Strategy::ALL {
            let out = run_one(&e, s, &cfg);
            assert_eq!(out.report.status, Status::Timeout);
            assert_eq!(out.report.oracle_runs, 3);
        }
    }

    #[test]
    fn empty_corpus() {
        assert!(run_bench(&[], &Strategy::ALL, &BenchConfig::default()).is_empty());
    }

    #[test]
    fn report_json_shape() {
        let e = entry(Format::Json, b"[1,]", Some(b"[1]"));
        let out = run_one(&e, Strategy::Fsynth, &BenchConfig::default());
        let v: serde_json::Value = serde_json::to_value(&out.report).unwrap();
        for key in [
            "file_id",
            "strategy",
            "status",
            "edit_distance",
            "recovery_pct",
            "oracle_runs",
            "wall_ms",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["strategy"], "fsynth");
        assert_eq!(v["status"], "Repaired");
        let back: RepairReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, out.report);
    }

    #[test]
    fn summary_counts() {
        let e = entry(Format::Json, b"[*]+", Some(b"[]"));
        let out = run_bench(&[e], &Strategy::ALL, &BenchConfig::default());
        let summary = Summary::from_reports(out.iter().map(|o| &o.report));
        assert_eq!(summary.repaired(Format::Json, Strategy::Fsynth), 1);
        assert_eq!(summary.repaired(Format::Json, Strategy::Ddmax), 0);
        assert!(summary.to_string().contains("fsynth"));
    }
}
