use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fsynth::bench::{
    generate_corpus, load_corpus, mutate, run_bench, write_corpus, BenchConfig, CorpusSpec, MutantMeta, Strategy, Summary,
    DEFAULT_CAP,
};
use fsynth::ddmax::ddmax;
use fsynth::repair::{Alphabet, Edit};
use fsynth::{repair, Format, OracleSession, ParseFeedback, RepairConfig, RepairError, RepairThread};
use serde::Serialize;

const EXIT_USAGE: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;

#[derive(Parser)]
#[command(name = "fsynth", version, about = "Repair corrupt structured inputs from parser feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repair an input by deleting and synthesizing bytes at the parse boundary.
    Repair(RepairArgs),
    /// Repair by maximizing delta debugging (deletions only).
    Ddmax(DdmaxArgs),
    /// Corrupt a valid file, or generate a whole seeded corpus.
    Mutate(MutateArgs),
    /// Run repair strategies over a corpus.
    Bench(BenchArgs),
    /// Print the feedback verdict for an input.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Limits {
    /// Wall-clock limit in seconds.
    #[arg(long, env = "FSYNTH_TIMEOUT_SECS", default_value_t = 60)]
    timeout: u64,
    /// Oracle-run limit.
    #[arg(long)]
    budget: Option<u64>,
}

impl Limits {
    fn session(&self, format: Format) -> OracleSession {
        let session = OracleSession::new(format).with_deadline(Instant::now() + Duration::from_secs(self.timeout));
        match self.budget {
            Some(b) => session.with_budget(b),
            None => session,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, env = "FSYNTH_SEED", default_value_t = 0)]
    seed: u64,
    /// File whose bytes, in order, are the insertion candidates.
    #[arg(long)]
    alphabet_file: Option<PathBuf>,
    /// Disable insertion; repair by deletion only.
    #[arg(long, conflicts_with = "alphabet_file")]
    no_insert: bool,
    /// Try insertions at every prefix position, not just the boundary.
    #[arg(long)]
    all_positions: bool,
    #[arg(long, default_value_t = 5)]
    max_per_mask: usize,
    /// Distinct best boundaries kept per generation; negative keeps all.
    #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
    max_corrections: i64,
    #[arg(long)]
    max_iterations: Option<usize>,
}

impl SearchArgs {
    fn config(&self) -> Result<RepairConfig> {
        let alphabet = match (&self.alphabet_file, self.no_insert) {
            (_, true) => None,
            (Some(path), false) => Some(Alphabet::new(read(path)?).with_context(|| format!("{}", path.display()))?),
            (None, false) => Some(Alphabet::printable()),
        };
        Ok(RepairConfig {
            last_insert_only: !self.all_positions,
            max_num_per_mask: self.max_per_mask,
            max_simultaneous_corrections: self.max_corrections,
            alphabet,
            rng_seed: self.seed,
            max_iterations: self.max_iterations,
            ..RepairConfig::default()
        })
    }
}

#[derive(Args)]
struct RepairArgs {
    #[arg(long, value_parser = parse_format)]
    format: Format,
    #[arg(long = "in")]
    input: PathBuf,
    /// Best repair; `-` writes it to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report of every repair found, best first.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Args)]
struct DdmaxArgs {
    #[arg(long, value_parser = parse_format)]
    format: Format,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Args)]
struct MutateArgs {
    #[arg(long, value_parser = parse_format, required_unless_present = "corpus")]
    format: Option<Format>,
    #[arg(long = "in", required_unless_present = "corpus", conflicts_with = "corpus")]
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "corpus")]
    out: Option<PathBuf>,
    /// Sidecar with the applied mutations.
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, env = "FSYNTH_SEED", default_value_t = 1)]
    seed: u64,
    /// Generate valid files plus single and multi mutants under this directory.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Comma-separated formats for --corpus.
    #[arg(long, value_delimiter = ',', value_parser = parse_format)]
    formats: Option<Vec<Format>>,
    #[arg(long, default_value_t = 50)]
    per_format: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "fsynth,ddmax")]
    strategies: Vec<Strategy>,
    /// JSON-lines report; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, env = "FSYNTH_TIMEOUT_SECS", default_value_t = 60)]
    timeout: u64,
    /// Oracle-run limit per file; 0 means none.
    #[arg(long, default_value_t = 5_000_000)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_parser = parse_format)]
    format: Format,
    /// Reads stdin when absent.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: fsynth::formats::UnknownFormat| e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if path == Path::new("-") {
        let mut out = io::stdout().lock();
        out.write_all(bytes)?;
        return out.flush().map_err(Into::into);
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_vec_pretty(value)?;
    text.push(b'\n');
    write(path, &text)
}

#[derive(Serialize)]
struct RankedRepair<'a> {
    rank: usize,
    edits: usize,
    deletes: usize,
    inserts: usize,
    boundary: usize,
    mask: &'a [Edit],
    /// Lossy text for reading; `bytes` is exact.
    text: String,
    bytes: &'a [u8],
}

#[derive(Serialize)]
struct RepairFile<'a> {
    format: Format,
    input: String,
    oracle_runs: u64,
    repairs: Vec<RankedRepair<'a>>,
}

fn ranked(fixes: &[RepairThread]) -> Vec<RankedRepair<'_>> {
    fixes
        .iter()
        .enumerate()
        .map(|(i, t)| RankedRepair {
            rank: i + 1,
            edits: t.edits(),
            deletes: t.deletes(),
            inserts: t.inserts(),
            boundary: t.boundary,
            mask: &t.mask,
            text: String::from_utf8_lossy(&t.content).into_owned(),
            bytes: &t.content,
        })
        .collect()
}

fn cmd_repair(args: RepairArgs) -> Result<ExitCode> {
    let cfg = args.search.config()?;
    let bytes = read(&args.input)?;
    let mut session = args.limits.session(args.format);
    let fixes = match repair(&mut session, &bytes, &cfg) {
        Ok(fixes) => fixes,
        Err(e @ (RepairError::Oracle(_) | RepairError::IterationLimit(_))) => {
            eprintln!("fsynth: {e}");
            return Ok(ExitCode::from(EXIT_TIMEOUT));
        }
        Err(e) => bail!(e),
    };
    let best = &fixes[0];
    if let Some(out) = &args.out {
        write(out, &best.content)?;
    }
    if let Some(report) = &args.report {
        let file = RepairFile {
            format: args.format,
            input: args.input.display().to_string(),
            oracle_runs: session.run_count(),
            repairs: ranked(&fixes),
        };
        write_json(report, &file)?;
    }
    eprintln!(
        "{} repair(s) with {} edit(s), {} oracle runs",
        fixes.len(),
        best.edits(),
        session.run_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_ddmax(args: DdmaxArgs) -> Result<ExitCode> {
    let bytes = read(&args.input)?;
    let mut session = args.limits.session(args.format);
    let out = match ddmax(&mut session, &bytes) {
        Ok(out) => out,
        Err(e) if e.is_timeout() => {
            eprintln!("fsynth: {e}");
            return Ok(ExitCode::from(EXIT_TIMEOUT));
        }
        Err(e) => bail!(e),
    };
    if let Some(path) = &args.out {
        write(path, &out.bytes)?;
    }
    eprintln!(
        "kept {} of {} bytes, {} oracle runs",
        out.bytes.len(),
        bytes.len(),
        session.run_count()
    );
    if !out.verified {
        bail!("no passing subsequence found; the empty result does not parse");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_mutate(args: MutateArgs) -> Result<ExitCode> {
    if let Some(root) = &args.corpus {
        let spec = CorpusSpec {
            formats: args.formats.unwrap_or_else(|| Format::ALL.to_vec()),
            per_format: args.per_format,
            seed: args.seed,
            ..CorpusSpec::default()
        };
        let files = generate_corpus(&spec);
        write_corpus(root, &files)?;
        eprintln!("wrote {} valid files and their mutants to {}", files.len(), root.display());
        return Ok(ExitCode::SUCCESS);
    }
    // clap guarantees these outside corpus mode
    let (Some(format), Some(input), Some(out)) = (args.format, &args.input, &args.out) else {
        bail!("--format, --in and --out are required");
    };
    let bytes = read(input)?;
    let (mutant, mutations) = mutate(format, &bytes, args.n, args.seed)?;
    write(out, &mutant)?;
    if let Some(meta) = &args.meta {
        let meta_value = MutantMeta {
            format,
            origin: input.display().to_string(),
            seed: args.seed,
            n_mutations: args.n,
            position_sampling: fsynth::bench::corpus::POSITION_SAMPLING.to_string(),
            mutations,
        };
        write_json(meta, &meta_value)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let cfg = BenchConfig {
        repair: args.search.config()?,
        timeout: Duration::from_secs(args.timeout),
        oracle_budget: (args.budget > 0).then_some(args.budget),
        cap: args.cap,
        jobs: args.jobs,
    };
    let entries = load_corpus(&args.corpus)?;
    let outcomes = run_bench(&entries, &args.strategies, &cfg);
    let mut lines = Vec::new();
    for o in &outcomes {
        serde_json::to_writer(&mut lines, &o.report)?;
        lines.push(b'\n');
    }
    match &args.out {
        Some(path) => write(path, &lines)?,
        None => io::stdout().lock().write_all(&lines)?,
    }
    let summary = Summary::from_reports(outcomes.iter().map(|o| &o.report));
    // the table goes to stderr when stdout carries the report
    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    let bytes = match &args.input {
        Some(path) => read(path)?,
        None => {
            let mut buf = Vec::new();
            io::stdin().lock().read_to_end(&mut buf)?;
            buf
        }
    };
    let verdict = args.format.classify(&bytes);
    println!("{}", verdict.as_str());
    Ok(ExitCode::from(match verdict {
        ParseFeedback::Complete => 0,
        ParseFeedback::Incomplete => 3,
        ParseFeedback::Incorrect => 4,
    }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Repair(a) => cmd_repair(a),
        Command::Ddmax(a) => cmd_ddmax(a),
        Command::Mutate(a) => cmd_mutate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("fsynth: {e:#}");
        ExitCode::from(EXIT_USAGE)
    })
}
