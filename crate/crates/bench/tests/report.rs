use proptest::prelude::*;
use recall_agent::ActionCounts;
use recall_bench::{wilson, EpisodeSummary, Method, OptimalCounts, RunEcho, SuiteReport};
use recall_core::{MemoryMode, TaskFamily, TaskType};

/// Wilson bounds as the roots of `n (p̂ - p)^2 = z^2 p (1 - p)`, solved with
/// the quadratic formula in `p`.
fn wilson_oracle(k: usize, n: usize) -> (f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    let (k, n) = (k as f64, n as f64);
    let ph = k / n;
    let a = n + z * z;
    let b = -(2.0 * n * ph + z * z);
    let c = n * ph * ph;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a))
}

#[test]
fn eleven_of_eighteen() {
    let (lo, hi) = wilson(11, 18);
    let (olo, ohi) = wilson_oracle(11, 18);
    assert!((lo - olo).abs() < 1e-12 && (hi - ohi).abs() < 1e-12);
    assert_eq!(format!("{lo:.2}"), "0.39");
    assert_eq!(format!("{hi:.3}"), "0.797");
}

#[test]
fn wilson_edges() {
    assert_eq!(wilson(0, 0), (0.0, 1.0));
    let (lo, hi) = wilson(0, 20);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.0 && hi < 0.2);
    let (lo, hi) = wilson(20, 20);
    assert!(lo > 0.8);
    assert_eq!(hi, 1.0);
}

proptest! {
    #[test]
    fn wilson_matches_oracle(n in 1usize..500, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson(k, n);
        let (olo, ohi) = wilson_oracle(k, n);
        prop_assert!((lo - olo.max(0.0)).abs() < 1e-9, "{} {}", lo, olo);
        prop_assert!((hi - ohi.min(1.0)).abs() < 1e-9);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }
}

fn summary(i: usize, success: bool, counts: [u32; 4], method: Method, task_type: TaskType) -> EpisodeSummary {
    EpisodeSummary {
        task_id: format!("t{i}"),
        task_type,
        family: if task_type == TaskType::Commonsense {
            TaskFamily::Commonsense
        } else {
            TaskFamily::MEMORY[i % 5]
        },
        method,
        mode: MemoryMode::Oracle,
        success,
        steps_used: counts.iter().sum(),
        termination: None,
        abort_reason: None,
        action_counts: ActionCounts {
            temporal_query: counts[0],
            perception: counts[1],
            navigation: counts[2],
            manipulation: counts[3],
        },
        optimal: if task_type == TaskType::Interactive {
            OptimalCounts::INTERACTIVE
        } else {
            OptimalCounts::VISIBLE
        },
        wrong_picks: vec![],
        error: None,
    }
}

fn echo() -> RunEcho {
    RunEcho {
        methods: vec![Method::TrS, Method::Star],
        modes: vec![MemoryMode::Oracle],
        budget: 20,
        tasks: 0,
        config_hash: None,
    }
}

proptest! {
    #[test]
    fn conservation_and_rate_bounds(
        eps in prop::collection::vec((any::<bool>(), prop::array::uniform4(0u32..8), 0usize..2, 0usize..3), 1..60)
    ) {
        let summaries: Vec<_> = eps
            .iter()
            .enumerate()
            .map(|(i, (ok, c, m, t))| {
                summary(i, *ok, *c, [Method::TrS, Method::Star][*m], [TaskType::Visible, TaskType::Interactive, TaskType::Commonsense][*t])
            })
            .collect();
        let report = SuiteReport::from_summaries(summaries.clone(), echo());
        for cell in &report.success {
            prop_assert!((0.0..=1.0).contains(&cell.rate));
            prop_assert!(cell.ci_low <= cell.rate && cell.rate <= cell.ci_high);
        }
        let total: usize = report.success.iter().map(|c| c.episodes).sum();
        prop_assert_eq!(total, summaries.len());
        for row in &report.counts {
            let ok: Vec<_> = summaries
                .iter()
                .filter(|s| s.success && s.method == row.method && s.mode == row.mode && s.task_type == row.task_type)
                .collect();
            prop_assert_eq!(row.successes, ok.len());
            let n = row.successes as f64;
            let sum = |f: fn(&ActionCounts) -> u32| ok.iter().map(|s| f(&s.action_counts)).sum::<u32>() as f64;
            prop_assert!((row.temporal_query * n - sum(|c| c.temporal_query)).abs() < 1e-6);
            prop_assert!((row.perception * n - sum(|c| c.perception)).abs() < 1e-6);
            prop_assert!((row.navigation * n - sum(|c| c.navigation)).abs() < 1e-6);
            prop_assert!((row.manipulation * n - sum(|c| c.manipulation)).abs() < 1e-6);
        }
        for mix in &report.mix {
            prop_assert!((0.0..=1.0).contains(&mix.spatial_share));
        }
    }
}

#[test]
fn table_has_family_columns() {
    let s = vec![
        summary(0, true, [1, 1, 1, 1], Method::Star, TaskType::Visible),
        summary(1, false, [3, 2, 2, 0], Method::TrS, TaskType::Visible),
    ];
    let table = SuiteReport::from_summaries(s, echo()).table();
    let header = table.lines().nth(1).unwrap();
    let cols: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(cols, ["Method", "Mode", "C", "A", "S", "ST", "SF"]);
    assert!(table.contains("STAR"));
    assert!(table.contains("TR+S"));
}

#[test]
fn counts_average_over_successes_only() {
    let s = vec![
        summary(0, true, [1, 1, 1, 1], Method::Star, TaskType::Visible),
        summary(1, true, [1, 3, 3, 1], Method::Star, TaskType::Visible),
        summary(2, false, [9, 9, 9, 2], Method::Star, TaskType::Visible),
    ];
    let r = SuiteReport::from_summaries(s, echo());
    let row = r.count_row(Method::Star, MemoryMode::Oracle, TaskType::Visible).unwrap();
    assert_eq!(row.successes, 2);
    assert_eq!(row.perception, 2.0);
    assert_eq!(row.physical, 5.0);
    assert_eq!(row.optimal_physical, 3.0);
    assert!((row.ratio_to_optimal - 5.0 / 3.0).abs() < 1e-12);
    let mix = r.mix_row(Method::Star, MemoryMode::Oracle).unwrap();
    assert_eq!(mix.totals.temporal_query, 11);
    assert!((mix.spatial_share - 30.0 / 41.0).abs() < 1e-12);
}
