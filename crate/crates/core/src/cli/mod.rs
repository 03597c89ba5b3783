//! The `limitlearn` command line.
//!
//! Every command is a pure function of its options and family, so a run
//! directory (`--out`) holds enough to replay it: `config.json` plus the
//! emitted traces and `summary.json`.
//!
//! Exit codes: 0 consistent outcome, 1 property violation, 2 parse error,
//! 3 representation error.

mod commands;
mod learner_spec;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::adversaries::SearchMode;
use crate::error::{Error, Result};
use crate::learners::Relation;
use crate::separability::Family;

pub use commands::execute;
pub use learner_spec::{build_learner, LEARNER_HELP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_REPRESENTATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "limitlearn", version, about = "Learning equivalence structures in the limit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Separability certificate for a family.
    Check(Opts),
    /// Run a learner on fair presentations of family members.
    Simulate(Opts),
    /// Build a presentation against a learner (limit or text adversary).
    Adversary(Opts),
    /// Expansionary-stage construction against a learner.
    Diagonalize(Opts),
    /// Search for a locking sequence or a violator.
    Locking(Opts),
    /// Translation to language learning.
    #[command(subcommand)]
    Bridge(BridgeCmd),
    /// Re-run a recorded run directory and compare every file.
    Replay {
        /// Directory written by an earlier `--out`.
        dir: PathBuf,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum BridgeCmd {
    /// `g_A` and `L(g_A)` for each member.
    Translate(Opts),
    /// Tell-tale search on the translated family.
    Telltale(Opts),
    /// Language round trip of Mstar against Mstar itself.
    Roundtrip(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    Limit,
    Text,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Opts {
    /// Family file (JSON: {"members": [...], "generator": {...}}).
    #[arg(long)]
    #[serde(skip)]
    pub family: Option<PathBuf>,
    #[arg(long, default_value = "mstar", help = format!("Learner: {LEARNER_HELP}"))]
    pub learner: String,
    /// Member index (all members when absent, where that makes sense).
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long, env = "LIMITLEARN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Stages (items) per run; construction stages for `diagonalize`.
    #[arg(long, default_value_t = 10_000)]
    pub horizon: usize,
    /// Stages the conjecture must stay fixed to count as converged.
    #[arg(long, default_value_t = 200)]
    pub window: usize,
    #[arg(long, default_value_t = 50)]
    pub depth: usize,
    #[arg(long, default_value_t = 4)]
    pub width: usize,
    /// Code bound for tell-tales and generator bound for `check`.
    #[arg(long, default_value_t = 64)]
    pub bound: u64,
    /// Directory for traces, summary and config.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent cells.
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = SearchMode::Informant)]
    pub mode: SearchMode,
    #[arg(long, value_enum, default_value_t = Relation::Iso)]
    pub relation: Relation,
    /// Number of consecutive seeds starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Fair-stream schedule variant (0 is the default schedule).
    #[arg(long, default_value_t = 0)]
    pub schedule: u64,
    #[arg(long, value_enum, default_value_t = AdversaryKind::Limit)]
    pub kind: AdversaryKind,
    /// Class size for `diagonalize`.
    #[arg(long, default_value_t = 2)]
    pub e: u64,
    /// Locking searches before the text adversary gives up.
    #[arg(long, default_value_t = 5)]
    pub rounds: usize,
    /// Mind changes the limit adversary must force (or leave the learner wrong).
    #[arg(long, default_value_t = 5)]
    pub min_changes: usize,
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub opts: Opts,
    pub family: Option<Value>,
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub summary: Value,
    /// File name to contents, `summary.json` included.
    pub files: BTreeMap<String, String>,
}

impl Outcome {
    pub(crate) fn new(code: i32, summary: Value) -> Self {
        let mut files = BTreeMap::new();
        files.insert("summary.json".to_string(), pretty(&summary));
        Outcome { code, summary, files }
    }

    pub(crate) fn file(mut self, name: impl Into<String>, contents: String) -> Self {
        self.files.insert(name.into(), contents);
        self
    }
}

pub(crate) fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ZeroSize
        | Error::InfiniteClasses
        | Error::EmptyCharacter
        | Error::Representation(_)
        | Error::Unrepresentable(_) => EXIT_REPRESENTATION,
        _ => EXIT_PARSE,
    }
}

fn load_family(path: &Path) -> Result<Family> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Family::parse(&text)
}

fn write_run(dir: &Path, record: &RunRecord, outcome: &Outcome) -> Result<()> {
    let io = |e: std::io::Error| Error::Parse(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let config = serde_json::to_value(record).expect("records serialize");
    fs::write(dir.join("config.json"), pretty(&config)).map_err(io)?;
    for (name, contents) in &outcome.files {
        fs::write(dir.join(name), contents).map_err(io)?;
    }
    Ok(())
}

fn replay(dir: &Path) -> Result<Outcome> {
    let path = dir.join("config.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let record: RunRecord = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("config.json: {e}")))?;
    let family = record.family.as_ref().map(Family::from_json).transpose()?;
    let again = execute(&record.command, &record.opts, family.as_ref())?;
    let mut mismatches = Vec::new();
    for (name, contents) in &again.files {
        match fs::read_to_string(dir.join(name)) {
            Ok(old) if old == *contents => {}
            Ok(_) => mismatches.push(format!("{name} differs")),
            Err(_) => mismatches.push(format!("{name} missing")),
        }
    }
    let code = if mismatches.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome::new(
        code,
        serde_json::json!({
            "replayed": record.command,
            "files": again.files.len(),
            "identical": mismatches.is_empty(),
            "mismatches": mismatches,
        }),
    ))
}

fn dispatch(command: Command) -> Result<Outcome> {
    let (name, opts) = match command {
        Command::Replay { dir } => return replay(&dir),
        Command::Check(o) => ("check", o),
        Command::Simulate(o) => ("simulate", o),
        Command::Adversary(o) => ("adversary", o),
        Command::Diagonalize(o) => ("diagonalize", o),
        Command::Locking(o) => ("locking", o),
        Command::Bridge(BridgeCmd::Translate(o)) => ("bridge-translate", o),
        Command::Bridge(BridgeCmd::Telltale(o)) => ("bridge-telltale", o),
        Command::Bridge(BridgeCmd::Roundtrip(o)) => ("bridge-roundtrip", o),
    };
    if opts.window == 0 || opts.horizon < opts.window {
        return Err(Error::Parse("need horizon >= window >= 1".into()));
    }
    let family = opts.family.as_deref().map(load_family).transpose()?;
    let outcome = crate::par::with_jobs(opts.jobs, || execute(name, &opts, family.as_ref()))?;
    if let Some(dir) = &opts.out {
        let record = RunRecord {
            command: name.to_string(),
            opts: opts.clone(),
            family: family.as_ref().map(Family::to_json),
        };
        write_run(dir, &record, &outcome)?;
    }
    Ok(outcome)
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_to(args, &mut std::io::stdout())
}

/// [`run`] with the summary written to `out`.
pub fn run_to<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => {
            if write!(out, "{}", pretty(&outcome.summary)).is_err() {
                return EXIT_PARSE;
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
