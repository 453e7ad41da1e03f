use recall_bench::{
    fixtures, generate_suite, prepare, read_summaries, run_suite, write_logs, Method, RunConfig, SuiteSpec, TaskSpec,
};
use recall_core::MemoryMode;

fn small_suite() -> Vec<TaskSpec> {
    generate_suite(&SuiteSpec {
        scenes: vec![1, 2],
        per_family: 1,
        ..SuiteSpec::default()
    })
    .unwrap()
}

fn logs(tasks: &[TaskSpec], cfg: &RunConfig) -> Vec<u8> {
    let run = run_suite(tasks, cfg).unwrap();
    let mut buf = Vec::new();
    write_logs(&run.records, &mut buf).unwrap();
    buf
}

#[test]
fn two_runs_produce_identical_logs_and_reports() {
    let tasks = small_suite();
    let serial = RunConfig {
        parallelism: 1,
        ..RunConfig::default()
    };
    let parallel = RunConfig {
        parallelism: 4,
        ..RunConfig::default()
    };
    let a = logs(&tasks, &serial);
    let b = logs(&tasks, &parallel);
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let ra = run_suite(&tasks, &serial).unwrap().report;
    let rb = run_suite(&tasks, &parallel).unwrap().report;
    assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
}

#[test]
fn logs_round_trip_to_the_same_report() {
    let tasks = small_suite();
    let cfg = RunConfig::default();
    let run = run_suite(&tasks, &cfg).unwrap();
    let mut buf = Vec::new();
    write_logs(&run.records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let summaries = read_summaries(&text).unwrap();
    assert_eq!(summaries, run.report.episodes);
    let steps = text.lines().filter(|l| l.contains("\"kind\":\"step\"")).count();
    let expected: usize = run.records.iter().map(|r| r.steps.len()).sum();
    assert_eq!(steps, expected);
    let again = recall_bench::SuiteReport::from_summaries(summaries, run.report.config.clone());
    assert_eq!(again, run.report);
}

#[test]
fn only_memory_methods_touch_memory_and_only_sg_gets_graphs() {
    let tasks = small_suite();
    let run = run_suite(&tasks, &RunConfig::default()).unwrap();
    for r in &run.records {
        if !r.method.uses_memory() {
            assert_eq!(r.action_counts.temporal_query, 0, "{} {}", r.method, r.task_id);
        }
    }
    assert!(prepare(&tasks[0], false).unwrap().graphs.is_empty());
    assert!(!prepare(&tasks[0], true).unwrap().graphs.is_empty());
    // The memory methods do use it.
    assert!(run
        .records
        .iter()
        .filter(|r| r.method == Method::Star)
        .all(|r| r.action_counts.temporal_query > 0));
}

#[test]
fn a_broken_task_is_recorded_as_a_failure() {
    let mut tasks = small_suite();
    tasks.truncate(2);
    tasks[0].scene_id = 9;
    let cfg = RunConfig {
        methods: vec![Method::Random, Method::Star],
        modes: vec![MemoryMode::Oracle],
        ..RunConfig::default()
    };
    let run = run_suite(&tasks, &cfg).unwrap();
    assert_eq!(run.records.len(), 4);
    assert!(run.records[..2].iter().all(|r| !r.success && r.error.is_some()));
    assert!(run.records[2..].iter().all(|r| r.error.is_none()));
}

#[test]
fn bad_configs_are_rejected() {
    let tasks = small_suite();
    let bad = [
        RunConfig {
            budget: 0,
            ..RunConfig::default()
        },
        RunConfig {
            methods: vec![],
            ..RunConfig::default()
        },
        RunConfig {
            methods: vec![Method::Llm],
            ..RunConfig::default()
        },
    ];
    for cfg in bad {
        assert!(run_suite(&tasks, &cfg).is_err());
    }
}

#[test]
fn no_trace_exceeds_the_budget() {
    let tasks = small_suite();
    for budget in [1, 5, 20] {
        let cfg = RunConfig {
            budget,
            ..RunConfig::default()
        };
        for r in run_suite(&tasks, &cfg).unwrap().records {
            assert!(r.steps.len() <= budget as usize);
            assert_eq!(r.steps_used as usize, r.steps.len());
        }
    }
}

#[test]
fn star_spends_a_larger_share_on_spatial_actions_than_tr_s() {
    let tasks = generate_suite(&SuiteSpec::default()).unwrap();
    let cfg = RunConfig {
        methods: vec![Method::TrS, Method::Star],
        ..RunConfig::default()
    };
    let report = run_suite(&tasks, &cfg).unwrap().report;
    for mode in [MemoryMode::Oracle, MemoryMode::Realistic] {
        let star = report.mix_row(Method::Star, mode).unwrap().spatial_share;
        let tr = report.mix_row(Method::TrS, mode).unwrap().spatial_share;
        assert!(star > tr, "{mode:?}: star {star} vs tr_s {tr}");
    }
}

#[test]
fn tr_s_unmoved_uses_three_spatial_actions() {
    let tasks = fixtures::unmoved_visible(6, 3, 200).unwrap();
    let cfg = RunConfig {
        methods: vec![Method::TrS],
        modes: vec![MemoryMode::Oracle],
        ..RunConfig::default()
    };
    for r in run_suite(&tasks, &cfg).unwrap().records {
        assert!(r.success, "{}", r.task_id);
        assert_eq!(r.action_counts.physical(), 3, "{}", r.task_id);
    }
}

#[test]
fn star_recovers_from_a_stale_hypothesis() {
    let tasks = fixtures::moved_after_patrol(6, 3, 200).unwrap();
    let cfg = RunConfig {
        methods: vec![Method::TrS, Method::Star],
        modes: vec![MemoryMode::Oracle],
        ..RunConfig::default()
    };
    for r in run_suite(&tasks, &cfg).unwrap().records {
        match r.method {
            Method::TrS => assert!(!r.success, "{}", r.task_id),
            _ => {
                assert!(r.success, "{}", r.task_id);
                // At least one detect before the final one came back without the target.
                let detects = r.steps.iter().filter(|s| s.action.tool == "detect").count();
                assert!(detects >= 2, "{}", r.task_id);
                let first_detect = r.steps.iter().position(|s| s.action.tool == "detect").unwrap();
                assert!(r.steps[first_detect + 1..]
                    .iter()
                    .any(|s| s.category == recall_core::ActionCategory::TemporalQuery));
            }
        }
    }
}
