use std::fs;
use std::io::Write;
use std::path::Path;

use recall_agent::StarConfig;
use recall_bench::{
    fixtures, generate_suite, read_header, read_summaries, run_suite, run_task, write_logs, LlmConfig, LogLine, Method,
    RunConfig, SuiteReport, SuiteSpec, TaskSpec, PAPER_PER_FAMILY, PAPER_TICKS_PER_DAY,
};
use recall_core::{MemoryMode, NoiseModel};
use recall_embed::{EmbedderConfig, EmbedderKind, ExternalEndpoint, ReferenceEmbedder};
use recall_homesim::{generate_world, patrol, PatrolPlan};
use recall_memstore::{persist, LongTermMemory, MemoryMeta};
use serde::Serialize;

use crate::artifact::{
    config_hash, read_stream, read_suite, read_world, write_json, write_stream, SuiteFile, WorldConfig, WorldFile,
    SUITE_FORMAT, WORLD_FORMAT,
};
use crate::{
    BuildMemoryArgs, CliError, Command, GenSuiteArgs, GenWorldArgs, LlmArgs, PatrolArgs, ReportArgs, ReportFormat,
    RunSuiteArgs, RunTaskArgs, SuiteArgs, EMBED_KEY_ENV, LLM_KEY_ENV,
};

pub fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::GenWorld(a) => gen_world(a, out),
        Command::Patrol(a) => cmd_patrol(a, out),
        Command::BuildMemory(a) => build_memory(a, out),
        Command::GenSuite(a) => gen_suite(a, out),
        Command::RunTask(a) => cmd_run_task(a, out),
        Command::RunSuite(a) => cmd_run_suite(a, out),
        Command::Report(a) => report(a, out),
    }
}

fn say(out: &mut dyn Write, text: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", text.as_ref()).map_err(|e| CliError::Runtime(e.to_string()))
}

fn need_input(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("input file {} does not exist", path.display())))
    }
}

fn need_output(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => {
            Err(CliError::Usage(format!("output directory {} does not exist", p.display())))
        }
        _ if path.is_dir() => Err(CliError::Usage(format!("output path {} is a directory", path.display()))),
        _ => Ok(()),
    }
}

fn gen_world(a: GenWorldArgs, out: &mut dyn Write) -> Result<(), CliError> {
    need_output(&a.out)?;
    let config = WorldConfig {
        command: "gen-world".into(),
        scene: a.scene,
        seed: a.seed,
    };
    let (world, schedule) = generate_world(a.seed, a.scene)?;
    let summary = format!(
        "rooms={} landmarks={} objects={}",
        world.rooms.len(),
        world.landmarks.len(),
        world.objects.len()
    );
    let file = WorldFile {
        format: WORLD_FORMAT.into(),
        config_hash: config_hash(&config),
        config,
        world,
        schedule,
    };
    write_json(&a.out, &file)?;
    say(out, summary)
}

#[derive(Serialize)]
struct PatrolConfig<'a> {
    command: &'a str,
    world: &'a str,
    days: u64,
    ticks_per_day: u64,
}

fn cmd_patrol(a: PatrolArgs, out: &mut dyn Write) -> Result<(), CliError> {
    need_input(&a.world)?;
    need_output(&a.out)?;
    let plan = PatrolPlan::new(a.days, a.ticks_per_day).map_err(|e| CliError::Usage(e.to_string()))?;
    let wf = read_world(&a.world)?;
    let lineage = config_hash(&PatrolConfig {
        command: "patrol",
        world: &wf.config_hash,
        days: a.days,
        ticks_per_day: a.ticks_per_day,
    });
    let run = patrol(&wf.world, &wf.schedule, plan)?;
    write_stream(&a.out, &run.frames, a.ticks_per_day, &lineage)?;
    say(out, format!("frames={} path={}", run.frames.len(), a.out.display()))
}

#[derive(Serialize)]
struct MemoryConfig<'a> {
    command: &'a str,
    stream: &'a str,
    mode: MemoryMode,
    noise_seed: u64,
    embedder: &'a EmbedderConfig,
}

fn build_memory(a: BuildMemoryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    need_input(&a.stream)?;
    need_output(&a.out)?;
    let embed_cfg = EmbedderConfig {
        kind: if a.embed.embed_url.is_some() {
            EmbedderKind::External
        } else {
            EmbedderKind::Reference
        },
        dim: a.embed.embed_dim,
        external: a.embed.embed_url.clone().map(|url| ExternalEndpoint {
            url,
            model: a.embed.embed_model.clone(),
            timeout_ms: 10_000,
            retries: 2,
            api_key_env: Some(EMBED_KEY_ENV.into()),
        }),
    };
    embed_cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let stream = read_stream(&a.stream)?;
    let embedder = embed_cfg.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut meta = MemoryMeta::new(embedder.as_ref(), stream.ticks_per_day, a.mode);
    meta.noise_seed = a.noise_seed;
    meta.config_hash = Some(config_hash(&MemoryConfig {
        command: "build-memory",
        stream: &stream.lineage,
        mode: a.mode,
        noise_seed: a.noise_seed,
        embedder: &embed_cfg,
    }));
    let memory = LongTermMemory::build(stream.frames.iter(), embedder.as_ref(), meta, NoiseModel::default())?;
    persist(&memory, &a.out)?;
    say(
        out,
        format!("records={} mode={} path={}", memory.len(), a.mode.as_str(), a.out.display()),
    )
}

fn suite_spec(a: &SuiteArgs) -> Result<SuiteSpec, CliError> {
    if let Some(s) = a.scenes.iter().find(|s| !recall_homesim::SCENE_IDS.contains(s)) {
        return Err(CliError::Usage(format!("unknown scene {s} (expected 1, 2 or 3)")));
    }
    let (per_family, ticks_per_day) = if a.paper_scale {
        (PAPER_PER_FAMILY, PAPER_TICKS_PER_DAY)
    } else {
        (a.per_family, a.ticks_per_day)
    };
    Ok(SuiteSpec {
        scenes: a.scenes.clone(),
        per_family,
        seed: a.seed,
        ticks_per_day,
    })
}

fn make_suite(spec: SuiteSpec) -> Result<SuiteFile, CliError> {
    let tasks = generate_suite(&spec)?;
    Ok(SuiteFile {
        format: SUITE_FORMAT.into(),
        config_hash: config_hash(&("gen-suite", &spec)),
        config: spec,
        tasks,
    })
}

fn gen_suite(a: GenSuiteArgs, out: &mut dyn Write) -> Result<(), CliError> {
    need_output(&a.out)?;
    let suite = make_suite(suite_spec(&a.suite)?)?;
    write_json(&a.out, &suite)?;
    let count = |t| suite.tasks.iter().filter(|x| x.task_type() == t).count();
    say(
        out,
        format!(
            "tasks={} visible={} interactive={} commonsense={} path={}",
            suite.tasks.len(),
            count(recall_core::TaskType::Visible),
            count(recall_core::TaskType::Interactive),
            count(recall_core::TaskType::Commonsense),
            a.out.display()
        ),
    )
}

fn llm_config(a: &LlmArgs, methods: &[Method]) -> Result<Option<LlmConfig>, CliError> {
    match (&a.llm_url, methods.contains(&Method::Llm)) {
        (None, true) => Err(CliError::Usage("the llm method needs --llm-url".into())),
        (Some(url), true) => Ok(Some(LlmConfig {
            url: url.clone(),
            model: a.llm_model.clone(),
            retries: a.llm_retries,
            timeout_ms: a.llm_timeout_ms,
            api_key: std::env::var(LLM_KEY_ENV).ok(),
        })),
        _ => Ok(None),
    }
}

fn fixture_task(name: &str, index: usize, seed: u64) -> Result<TaskSpec, CliError> {
    let n = index + 1;
    let tpd = recall_core::DEFAULT_TICKS_PER_DAY;
    let set = match name {
        "unmoved" => fixtures::unmoved_visible(n, seed, tpd)?,
        "moved" => fixtures::moved_after_patrol(n, seed, tpd)?,
        "twin" => fixtures::twin_interactive(n, seed, tpd)?,
        "commonsense" => fixtures::commonsense(n, seed, tpd)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown fixture {other:?} (expected unmoved, moved, twin or commonsense)"
            )))
        }
    };
    Ok(set.into_iter().last().expect("n >= 1"))
}

fn cmd_run_task(a: RunTaskArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(log) = &a.log {
        need_output(log)?;
    }
    let task = match (&a.suite, &a.fixture) {
        (Some(path), _) => {
            need_input(path)?;
            let id = a.task.as_deref().expect("clap requires --task with --suite");
            read_suite(path)?
                .tasks
                .into_iter()
                .find(|t| t.id == id)
                .ok_or_else(|| CliError::Usage(format!("no task {id} in {}", path.display())))?
        }
        (None, Some(name)) => fixture_task(name, a.index, a.seed)?,
        (None, None) => return Err(CliError::Usage("give --suite with --task, or --fixture".into())),
    };
    let cfg = RunConfig {
        methods: vec![a.method],
        modes: vec![a.mode],
        budget: a.budget,
        parallelism: 1,
        llm: llm_config(&a.llm, &[a.method])?,
        ..RunConfig::default()
    };
    let embedder = ReferenceEmbedder::new(cfg.embed_dim).map_err(|e| CliError::Runtime(e.to_string()))?;
    let records = run_task(&task, &cfg, &embedder);
    let r = records.first().expect("one method, one mode");
    if let Some(log) = &a.log {
        let mut buf = Vec::new();
        write_logs(&records, &mut buf).map_err(|e| CliError::Runtime(e.to_string()))?;
        fs::write(log, buf).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", log.display())))?;
    }
    say(out, format!("instruction: {}", task.instruction.text))?;
    for (i, s) in r.steps.iter().enumerate() {
        let action = serde_json::to_string(&s.action).expect("actions serialize");
        say(out, format!("{:>2} {action} -> {}", i + 1, describe(&s.outcome)))?;
    }
    say(
        out,
        format!(
            "task={} method={} mode={} success={} steps={}",
            r.task_id,
            r.method,
            r.mode.as_str(),
            r.success,
            r.steps_used
        ),
    )?;
    match &r.error {
        Some(e) => Err(CliError::Runtime(format!("episode failed to run: {e}"))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct SuiteRunConfig<'a> {
    command: &'a str,
    suite: &'a str,
    methods: &'a [Method],
    modes: &'a [MemoryMode],
    budget: u32,
    embed_dim: usize,
    noise: &'a NoiseModel,
    star: &'a StarConfig,
    llm: Option<&'a LlmConfig>,
}

fn cmd_run_suite(a: RunSuiteArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.out_dir.is_file() {
        return Err(CliError::Usage(format!("{} is a file", a.out_dir.display())));
    }
    if let Some(p) = &a.suite {
        need_input(p)?;
    }
    let llm = llm_config(&a.llm, &a.methods)?;
    let suite = match &a.suite {
        Some(p) => read_suite(p)?,
        None => make_suite(suite_spec(&a.gen)?)?,
    };
    let mut cfg = RunConfig {
        methods: a.methods.clone(),
        modes: a.modes.clone(),
        budget: a.budget,
        parallelism: a.parallelism,
        embed_dim: a.embed_dim,
        llm,
        ..RunConfig::default()
    };
    cfg.methods.dedup();
    cfg.modes.dedup();
    let hash = config_hash(&SuiteRunConfig {
        command: "run-suite",
        suite: &suite.config_hash,
        methods: &cfg.methods,
        modes: &cfg.modes,
        budget: cfg.budget,
        embed_dim: cfg.embed_dim,
        noise: &cfg.noise,
        star: &cfg.star,
        llm: cfg.llm.as_ref(),
    });
    let mut run = run_suite(&suite.tasks, &cfg)?;
    run.report.config.config_hash = Some(hash.clone());

    fs::create_dir_all(&a.out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", a.out_dir.display())))?;
    let mut log = Vec::new();
    let header = LogLine::Header {
        config_hash: hash,
        suite_hash: suite.config_hash.clone(),
    };
    serde_json::to_writer(&mut log, &header).expect("header serializes");
    log.push(b'\n');
    write_logs(&run.records, &mut log).map_err(|e| CliError::Runtime(e.to_string()))?;
    let log_path = a.out_dir.join("episodes.jsonl");
    fs::write(&log_path, log).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", log_path.display())))?;
    write_json(&a.out_dir.join("report.json"), &run.report)?;

    say(out, run.report.table())?;
    let failed = run.records.iter().filter(|r| r.error.is_some()).count();
    say(
        out,
        format!(
            "episodes={} crashed={failed} out={}",
            run.records.len(),
            a.out_dir.display()
        ),
    )
}

fn report(a: ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report_path = a.run.join("report.json");
    let log_path = a.run.join("episodes.jsonl");
    need_input(&report_path)?;
    need_input(&log_path)?;
    if let Some(p) = &a.suite {
        need_input(p)?;
    }
    let stored: SuiteReport = crate::artifact::read_json(&report_path, "report")?;
    let log = fs::read_to_string(&log_path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", log_path.display())))?;
    let summaries = read_summaries(&log)?;
    let mut problems = Vec::new();
    match read_header(&log) {
        None => problems.push("episode log has no lineage header".to_string()),
        Some((run_hash, suite_hash)) => {
            if stored.config.config_hash.as_deref() != Some(run_hash.as_str()) {
                problems.push(format!(
                    "report.json comes from run {:?} but the log from run {run_hash}",
                    stored.config.config_hash
                ));
            }
            if let Some(p) = &a.suite {
                let suite = read_suite(p)?;
                if suite.config_hash != suite_hash {
                    problems.push(format!(
                        "run used suite {suite_hash} but {} is suite {}",
                        p.display(),
                        suite.config_hash
                    ));
                }
            }
        }
    }
    let rebuilt = SuiteReport::from_summaries(summaries, stored.config.clone());
    if rebuilt != stored {
        problems.push("report.json does not match the episode log".into());
    }
    if !problems.is_empty() && !a.force {
        return Err(CliError::Runtime(format!(
            "lineage mismatch (use --force to render anyway): {}",
            problems.join("; ")
        )));
    }
    let text = match a.format {
        ReportFormat::Table => rebuilt.table(),
        ReportFormat::Csv => rebuilt.to_csv(),
        ReportFormat::Json => serde_json::to_string_pretty(&rebuilt).expect("reports serialize"),
    };
    say(out, text.trim_end())
}

fn describe(o: &recall_core::Outcome) -> String {
    use recall_core::Outcome;
    match o {
        Outcome::Retrieval { hits } => format!("{} hits", hits.len()),
        Outcome::RawObservation { record_index, .. } => format!("raw observation {record_index}"),
        Outcome::Perception { detection } => {
            let ids: Vec<&str> = detection.entities.iter().map(|e| e.entity_id.as_str()).collect();
            format!("sees [{}]", ids.join(", "))
        }
        Outcome::SkillResult { success: true, .. } => "ok".into(),
        Outcome::SkillResult { reason, .. } => format!("failed: {}", reason.as_deref().unwrap_or("unknown")),
        Outcome::Rejected { diagnostics } => format!("rejected ({} field errors)", diagnostics.len()),
    }
}
