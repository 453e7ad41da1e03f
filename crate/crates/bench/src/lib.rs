//! Task generation, suite runner and report aggregation for the object
//! search benchmark.

mod adjudicate;
mod error;
pub mod fixtures;
pub mod generate;
pub mod hazard;
pub mod optimal;
pub mod report;
pub mod runner;
pub mod task;

pub use adjudicate::adjudicate;
pub use error::BenchError;
pub use generate::{
    expected_counts, generate_suite, generate_task, interactive_per_family, SuiteSpec, DEFAULT_PER_FAMILY,
    PAPER_PER_FAMILY, PAPER_TICKS_PER_DAY,
};
pub use hazard::check_hazard;
pub use optimal::optimal_counts;
pub use report::{wilson, CountRow, MixRow, RunEcho, SuccessCell, SuiteReport};
pub use runner::{
    build_memory, prepare, read_header, read_summaries, run_suite, run_task, write_logs, EpisodeRecord, EpisodeSummary, LlmConfig,
    LogLine, RunConfig, SuiteRun,
};
pub use task::{Hazard, Method, OptimalCounts, TaskSpec, TwinReceptacle};
