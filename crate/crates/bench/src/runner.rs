//! Runs every (task, method, mode) episode and collects per-episode
//! records. Episodes are independent and run in parallel; results are
//! gathered in task order so output does not depend on scheduling.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use rayon::prelude::*;
use recall_agent::{
    run_episode, standard_registry, ActionCounts, ChatAdapter, EpisodeResult, Environment, ExternalPolicy,
    MemoryAccess, Policy, RandomPolicy, RegistrySchema, SceneGraphPolicy, StarConfig, StarPolicy,
    TemporalRetrievalPolicy, Termination, DEFAULT_BUDGET,
};
use recall_core::{derive_seed, Action, ActionCategory, Frame, MemoryMode, NoiseModel, Outcome, TaskFamily, TaskType};
use recall_embed::{Embedder, HttpTransport, ReferenceEmbedder, DEFAULT_DIM};
use recall_homesim::{export_scene_graphs, generate_world, patrol, PatrolPlan, SceneGraph, Simulation};
use recall_memstore::{LongTermMemory, MemoryMeta};
use serde::{Deserialize, Serialize};

use crate::adjudicate::adjudicate;
use crate::report::{RunEcho, SuiteReport};
use crate::task::{Method, OptimalCounts, TaskSpec};
use crate::BenchError;

/// Endpoint settings for the external chat-completion policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmConfig {
    pub url: String,
    pub model: String,
    pub retries: u32,
    pub timeout_ms: u64,
    /// Bearer token; never serialized.
    #[serde(skip)]
    pub api_key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub methods: Vec<Method>,
    pub modes: Vec<MemoryMode>,
    pub budget: u32,
    /// Worker threads; 0 uses all cores.
    pub parallelism: usize,
    pub embed_dim: usize,
    pub noise: NoiseModel,
    pub star: StarConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub llm: Option<LlmConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            methods: Method::SCRIPTED.to_vec(),
            modes: vec![MemoryMode::Oracle, MemoryMode::Realistic],
            budget: DEFAULT_BUDGET,
            parallelism: 0,
            embed_dim: DEFAULT_DIM,
            noise: NoiseModel::default(),
            star: StarConfig::default(),
            llm: None,
        }
    }
}

/// Patrol output and task-time world for one task.
pub struct Prepared {
    pub frames: Vec<Frame>,
    pub sim: Simulation,
    pub graphs: Vec<SceneGraph>,
}

pub fn prepare(task: &TaskSpec, with_graphs: bool) -> Result<Prepared, BenchError> {
    let (world, _) = generate_world(task.layout_seed, task.scene_id)?;
    let plan = PatrolPlan::new(task.patrol_days, task.ticks_per_day)?;
    let run = patrol(&world, &task.schedule, plan)?;
    let graphs = if with_graphs {
        export_scene_graphs(&world, &task.schedule, task.patrol_days, task.ticks_per_day)?
    } else {
        Vec::new()
    };
    Ok(Prepared {
        frames: run.frames,
        sim: run.sim,
        graphs,
    })
}

/// Noise stream seed for a task's realistic-mode memory.
pub fn noise_seed(task: &TaskSpec) -> u64 {
    derive_seed(task.seed(), 0x6e01_5e00)
}

pub fn build_memory(
    task: &TaskSpec,
    frames: &[Frame],
    mode: MemoryMode,
    embedder: &dyn Embedder,
    noise: &NoiseModel,
) -> Result<LongTermMemory, BenchError> {
    let mut meta = MemoryMeta::new(embedder, task.ticks_per_day, mode);
    meta.noise_seed = noise_seed(task);
    Ok(LongTermMemory::build(frames.iter(), embedder, meta, noise.clone())?)
}

fn method_index(m: Method) -> u64 {
    Method::SCRIPTED.iter().position(|x| *x == m).unwrap_or(4) as u64
}

/// Builds the policy for `method`. Only SG+S receives scene graphs; the
/// memory methods get memory through the registry instead.
pub fn make_policy(
    method: Method,
    task: &TaskSpec,
    graphs: &[SceneGraph],
    cfg: &RunConfig,
) -> Result<Box<dyn Policy>, String> {
    let seed = derive_seed(task.seed(), method_index(method));
    Ok(match method {
        Method::Random => Box::new(RandomPolicy::new(seed)),
        Method::SgS => Box::new(SceneGraphPolicy::new(graphs.to_vec(), seed)),
        Method::TrS => Box::new(TemporalRetrievalPolicy::new()),
        Method::Star => Box::new(StarPolicy::new(cfg.star.clone())),
        Method::Llm => {
            let llm = cfg.llm.as_ref().ok_or("llm method requires an endpoint configuration")?;
            let transport = HttpTransport::new(
                llm.url.clone(),
                Duration::from_millis(llm.timeout_ms),
                llm.api_key.clone(),
            );
            Box::new(ExternalPolicy::new(
                Box::new(transport),
                Box::new(ChatAdapter::new(llm.model.clone())),
                llm.retries,
            ))
        }
    })
}

/// Runs one episode from the prepared task-time world.
pub fn run_one(
    task: &TaskSpec,
    prepared: &Prepared,
    memory: Option<&LongTermMemory>,
    embedder: &dyn Embedder,
    method: Method,
    cfg: &RunConfig,
) -> Result<EpisodeResult, String> {
    let mut policy = make_policy(method, task, &prepared.graphs, cfg)?;
    let memory = if method.uses_memory() { memory } else { None };
    let registry = standard_registry(memory.is_some());
    let mut sim = prepared.sim.clone();
    let schema = RegistrySchema::new(&registry, sim.world(), memory, task.task_time());
    let mut env = Environment {
        registry: &registry,
        memory: memory.map(|m| MemoryAccess { memory: m, embedder }),
        sim: &mut sim,
    };
    Ok(run_episode(&task.instruction, &task.target, &mut env, &schema, policy.as_mut(), cfg.budget))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub action: Action,
    pub outcome: Outcome,
    pub category: ActionCategory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

/// Everything recorded about one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub task_id: String,
    pub task_type: TaskType,
    pub family: TaskFamily,
    pub method: Method,
    pub mode: MemoryMode,
    pub success: bool,
    pub steps_used: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort_reason: Option<String>,
    pub action_counts: ActionCounts,
    pub optimal: OptimalCounts,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wrong_picks: Vec<u32>,
    /// Set when the episode could not run or crashed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub steps: Vec<StepLog>,
}

impl EpisodeRecord {
    fn new(task: &TaskSpec, method: Method, mode: MemoryMode) -> Self {
        Self {
            task_id: task.id.clone(),
            task_type: task.task_type(),
            family: task.family(),
            method,
            mode,
            success: false,
            steps_used: 0,
            termination: None,
            abort_reason: None,
            action_counts: ActionCounts::default(),
            optimal: task.optimal,
            wrong_picks: Vec::new(),
            error: None,
            steps: Vec::new(),
        }
    }

    fn failed(task: &TaskSpec, method: Method, mode: MemoryMode, error: String) -> Self {
        Self {
            error: Some(error),
            ..Self::new(task, method, mode)
        }
    }

    fn from_result(task: &TaskSpec, method: Method, mode: MemoryMode, r: EpisodeResult, budget: u32) -> Self {
        let success = adjudicate(task, &r.trace, budget);
        let steps = r
            .trace
            .steps()
            .iter()
            .zip(&r.categories)
            .zip(&r.rationales)
            .map(|((s, c), why)| StepLog {
                action: s.action.clone(),
                outcome: s.outcome.clone(),
                category: *c,
                rationale: why.clone(),
            })
            .collect();
        Self {
            success,
            steps_used: r.steps_used,
            termination: Some(r.termination),
            abort_reason: r.abort_reason,
            action_counts: r.action_counts,
            wrong_picks: r.wrong_picks,
            steps,
            ..Self::new(task, method, mode)
        }
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "episode panicked".into())
}

/// All episodes of one task, in (mode, method) order.
pub fn run_task(task: &TaskSpec, cfg: &RunConfig, embedder: &dyn Embedder) -> Vec<EpisodeRecord> {
    let with_graphs = cfg.methods.contains(&Method::SgS);
    let prepared = match catch_unwind(AssertUnwindSafe(|| prepare(task, with_graphs))) {
        Ok(Ok(p)) => p,
        Ok(Err(e)) => return fail_all(task, cfg, e.to_string()),
        Err(p) => return fail_all(task, cfg, panic_message(p)),
    };
    let needs_memory = cfg.methods.iter().any(Method::uses_memory);
    let mut out = Vec::new();
    for &mode in &cfg.modes {
        let memory = if needs_memory {
            match build_memory(task, &prepared.frames, mode, embedder, &cfg.noise) {
                Ok(m) => Some(m),
                Err(e) => {
                    out.extend(cfg.methods.iter().map(|m| EpisodeRecord::failed(task, *m, mode, e.to_string())));
                    continue;
                }
            }
        } else {
            None
        };
        for &method in &cfg.methods {
            let run = catch_unwind(AssertUnwindSafe(|| {
                run_one(task, &prepared, memory.as_ref(), embedder, method, cfg)
            }));
            out.push(match run {
                Ok(Ok(r)) => EpisodeRecord::from_result(task, method, mode, r, cfg.budget),
                Ok(Err(e)) => EpisodeRecord::failed(task, method, mode, e),
                Err(p) => EpisodeRecord::failed(task, method, mode, panic_message(p)),
            });
        }
    }
    out
}

fn fail_all(task: &TaskSpec, cfg: &RunConfig, error: String) -> Vec<EpisodeRecord> {
    cfg.modes
        .iter()
        .flat_map(|mode| {
            cfg.methods
                .iter()
                .map(|m| EpisodeRecord::failed(task, *m, *mode, error.clone()))
                .collect::<Vec<_>>()
        })
        .collect()
}

pub struct SuiteRun {
    pub records: Vec<EpisodeRecord>,
    pub report: SuiteReport,
}

pub fn run_suite(tasks: &[TaskSpec], cfg: &RunConfig) -> Result<SuiteRun, BenchError> {
    if cfg.budget == 0 {
        return Err(BenchError::InvalidArgument("budget must be at least 1".into()));
    }
    if cfg.methods.is_empty() || cfg.modes.is_empty() {
        return Err(BenchError::InvalidArgument("select at least one method and one mode".into()));
    }
    if cfg.methods.contains(&Method::Llm) && cfg.llm.is_none() {
        return Err(BenchError::InvalidArgument("llm method requires an endpoint configuration".into()));
    }
    let embedder = ReferenceEmbedder::new(cfg.embed_dim).map_err(|e| BenchError::InvalidArgument(e.to_string()))?;
    let work = || -> Vec<EpisodeRecord> {
        tasks
            .par_iter()
            .map(|t| run_task(t, cfg, &embedder))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    let records = if cfg.parallelism > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .map_err(|e| BenchError::InvalidArgument(e.to_string()))?
            .install(work)
    } else {
        work()
    };
    let echo = RunEcho {
        methods: cfg.methods.clone(),
        modes: cfg.modes.clone(),
        budget: cfg.budget,
        tasks: tasks.len(),
        config_hash: None,
    };
    let report = SuiteReport::from_records(&records, echo);
    Ok(SuiteRun { records, report })
}

/// One structured line per step plus one summary line per episode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogLine {
    /// Optional first line tying the log to the run that produced it.
    Header { config_hash: String, suite_hash: String },
    Step {
        task_id: String,
        method: Method,
        mode: MemoryMode,
        step: u32,
        #[serde(flatten)]
        entry: StepLog,
    },
    Episode {
        #[serde(flatten)]
        summary: EpisodeSummary,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub task_id: String,
    pub task_type: TaskType,
    pub family: TaskFamily,
    pub method: Method,
    pub mode: MemoryMode,
    pub success: bool,
    pub steps_used: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort_reason: Option<String>,
    pub action_counts: ActionCounts,
    pub optimal: OptimalCounts,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wrong_picks: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&EpisodeRecord> for EpisodeSummary {
    fn from(r: &EpisodeRecord) -> Self {
        Self {
            task_id: r.task_id.clone(),
            task_type: r.task_type,
            family: r.family,
            method: r.method,
            mode: r.mode,
            success: r.success,
            steps_used: r.steps_used,
            termination: r.termination,
            abort_reason: r.abort_reason.clone(),
            action_counts: r.action_counts,
            optimal: r.optimal,
            wrong_picks: r.wrong_picks.clone(),
            error: r.error.clone(),
        }
    }
}

pub fn write_logs<W: Write>(records: &[EpisodeRecord], mut w: W) -> std::io::Result<()> {
    for r in records {
        for (i, s) in r.steps.iter().enumerate() {
            let line = LogLine::Step {
                task_id: r.task_id.clone(),
                method: r.method,
                mode: r.mode,
                step: i as u32,
                entry: s.clone(),
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        serde_json::to_writer(&mut w, &LogLine::Episode { summary: r.into() })?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// The header line of a log, if it has one.
pub fn read_header(text: &str) -> Option<(String, String)> {
    let first = text.lines().next()?;
    match serde_json::from_str::<LogLine>(first).ok()? {
        LogLine::Header { config_hash, suite_hash } => Some((config_hash, suite_hash)),
        _ => None,
    }
}

/// Reads episode summaries back from a log file, ignoring other lines.
pub fn read_summaries(text: &str) -> Result<Vec<EpisodeSummary>, BenchError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: serde_json::Value =
            serde_json::from_str(line).map_err(|e| BenchError::Format(format!("log line {}: {e}", i + 1)))?;
        if v["kind"] == "episode" {
            out.push(serde_json::from_value(v).map_err(|e| BenchError::Format(format!("log line {}: {e}", i + 1)))?);
        }
    }
    Ok(out)
}
