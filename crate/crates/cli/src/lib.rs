//! The `recall` command line: world -> patrol -> memory -> run -> report.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

pub mod artifact;
mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use recall_bench::Method;
use recall_core::MemoryMode;

/// Environment variable holding the bearer token for the external policy
/// endpoint. Credentials are the only thing read from the environment.
pub const LLM_KEY_ENV: &str = "RECALL_LLM_API_KEY";
/// Same, for an external embedding endpoint.
pub const EMBED_KEY_ENV: &str = "RECALL_EMBED_API_KEY";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<recall_bench::BenchError> for CliError {
    fn from(e: recall_bench::BenchError) -> Self {
        match e {
            recall_bench::BenchError::InvalidArgument(m) => CliError::Usage(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<recall_homesim::SimError> for CliError {
    fn from(e: recall_homesim::SimError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<recall_memstore::MemError> for CliError {
    fn from(e: recall_memstore::MemError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "recall", version, about = "Household object search with long-term memory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a scene layout and its background schedule.
    GenWorld(GenWorldArgs),
    /// Replay the schedule while the robot patrols; write the observation stream.
    Patrol(PatrolArgs),
    /// Build a long-term memory file from an observation stream.
    BuildMemory(BuildMemoryArgs),
    /// Generate a task suite.
    GenSuite(GenSuiteArgs),
    /// Run one method on one task.
    RunTask(RunTaskArgs),
    /// Run methods over a suite and write logs and a report.
    RunSuite(RunSuiteArgs),
    /// Render a report from a run directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenWorldArgs {
    /// Scene id (1, 2 or 3).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub scene: u8,
    /// Layout seed.
    #[arg(long)]
    pub seed: u64,
    /// Output world file.
    #[arg(long, default_value = "world.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PatrolArgs {
    /// World file from gen-world.
    #[arg(long, default_value = "world.json")]
    pub world: PathBuf,
    /// Patrol length in days (3 to 6).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(3..=6))]
    pub days: u64,
    /// Observations per day.
    #[arg(long, default_value_t = recall_core::DEFAULT_TICKS_PER_DAY, value_parser = clap::value_parser!(u64).range(1..))]
    pub ticks_per_day: u64,
    /// Output stream file, one observation per line.
    #[arg(long, default_value = "stream.jsonl")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Embedding dimension.
    #[arg(long, default_value_t = recall_embed::DEFAULT_DIM)]
    pub embed_dim: usize,
    /// External embedding endpoint; the built-in hashing embedder is used when absent.
    #[arg(long)]
    pub embed_url: Option<String>,
    /// Model name sent to the external embedding endpoint.
    #[arg(long, default_value = "text-embedding")]
    pub embed_model: String,
}

#[derive(Debug, Args)]
pub struct BuildMemoryArgs {
    /// Observation stream from patrol.
    #[arg(long, default_value = "stream.jsonl")]
    pub stream: PathBuf,
    /// Caption mode: oracle or realistic.
    #[arg(long, default_value = "oracle")]
    pub mode: MemoryMode,
    /// Seed of the caption noise stream (realistic mode).
    #[arg(long, default_value_t = 1)]
    pub noise_seed: u64,
    #[command(flatten)]
    pub embed: EmbedArgs,
    /// Output memory file.
    #[arg(long, default_value = "memory.jsonl")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Suite seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Visible tasks per scene and family; commonsense tasks per scene.
    #[arg(long, default_value_t = recall_bench::DEFAULT_PER_FAMILY, value_parser = positive)]
    pub per_family: usize,
    /// Scenes to include.
    #[arg(long, value_delimiter = ',', default_values_t = [1u8, 2, 3])]
    pub scenes: Vec<u8>,
    /// Observations per patrol day.
    #[arg(long, default_value_t = recall_core::DEFAULT_TICKS_PER_DAY, value_parser = clap::value_parser!(u64).range(1..))]
    pub ticks_per_day: u64,
    /// Full-size counts and day length (overrides --per-family and --ticks-per-day).
    #[arg(long)]
    pub paper_scale: bool,
}

#[derive(Debug, Args)]
pub struct GenSuiteArgs {
    #[command(flatten)]
    pub suite: SuiteArgs,
    /// Output suite file.
    #[arg(long, default_value = "suite.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LlmArgs {
    /// Chat-completions endpoint for the llm method.
    #[arg(long)]
    pub llm_url: Option<String>,
    /// Model name sent to the endpoint.
    #[arg(long, default_value = "gpt-4o")]
    pub llm_model: String,
    /// Transport retries per request.
    #[arg(long, default_value_t = 2)]
    pub llm_retries: u32,
    /// Per-request timeout in milliseconds.
    #[arg(long, default_value_t = 60_000)]
    pub llm_timeout_ms: u64,
}

#[derive(Debug, Args)]
pub struct RunTaskArgs {
    /// Suite file holding the task.
    #[arg(long, conflicts_with = "fixture", requires = "task")]
    pub suite: Option<PathBuf>,
    /// Task id within the suite.
    #[arg(long)]
    pub task: Option<String>,
    /// Built-in fixture set instead of a suite: unmoved, moved, twin or commonsense.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Index within the fixture set.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Fixture seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Method: random, sg_s, tr_s, star or llm.
    #[arg(long)]
    pub method: Method,
    /// Memory mode: oracle or realistic.
    #[arg(long, default_value = "oracle")]
    pub mode: MemoryMode,
    /// Step budget.
    #[arg(long, default_value_t = recall_agent::DEFAULT_BUDGET, value_parser = clap::value_parser!(u32).range(1..))]
    pub budget: u32,
    /// Also write the episode log here.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Args)]
pub struct RunSuiteArgs {
    /// Suite file; when absent a suite is generated from the suite flags.
    #[arg(long)]
    pub suite: Option<PathBuf>,
    #[command(flatten)]
    pub gen: SuiteArgs,
    /// Methods to run.
    #[arg(long, value_delimiter = ',', default_values_t = Method::SCRIPTED)]
    pub methods: Vec<Method>,
    /// Memory modes to run.
    #[arg(long = "mode", value_delimiter = ',', default_values_t = [MemoryMode::Oracle, MemoryMode::Realistic])]
    pub modes: Vec<MemoryMode>,
    /// Step budget.
    #[arg(long, default_value_t = recall_agent::DEFAULT_BUDGET, value_parser = clap::value_parser!(u32).range(1..))]
    pub budget: u32,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub parallelism: usize,
    /// Embedding dimension.
    #[arg(long, default_value_t = recall_embed::DEFAULT_DIM)]
    pub embed_dim: usize,
    /// Output directory for episodes.jsonl and report.json.
    #[arg(long, default_value = "run")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory written by run-suite.
    #[arg(long, default_value = "run")]
    pub run: PathBuf,
    /// Suite file the run is expected to come from.
    #[arg(long)]
    pub suite: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: ReportFormat,
    /// Render even when the files do not belong together.
    #[arg(long)]
    pub force: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Parses `args` and runs the command, writing normal output to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
