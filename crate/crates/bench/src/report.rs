//! Aggregation of episode records into success-rate, action-count and
//! action-mix tables.

use std::collections::BTreeMap;
use std::fmt::Write;

use recall_agent::ActionCounts;
use recall_core::{MemoryMode, TaskFamily, TaskType};
use serde::{Deserialize, Serialize};

use crate::runner::EpisodeSummary;
use crate::task::{Method, OptimalCounts};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes out of `n` trials.
pub fn wilson(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The bounds are exactly 0 and 1 at the extremes; rounding can leave
    // them a hair off.
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Configuration echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEcho {
    pub methods: Vec<Method>,
    pub modes: Vec<MemoryMode>,
    pub budget: u32,
    pub tasks: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessCell {
    pub method: Method,
    pub mode: MemoryMode,
    pub task_type: TaskType,
    pub family: TaskFamily,
    pub episodes: usize,
    pub successes: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Mean per-category counts over successful runs only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub method: Method,
    pub mode: MemoryMode,
    pub task_type: TaskType,
    pub successes: usize,
    pub temporal_query: f64,
    pub perception: f64,
    pub navigation: f64,
    pub manipulation: f64,
    /// Physical actions per successful run.
    pub physical: f64,
    pub optimal_physical: f64,
    pub ratio_to_optimal: f64,
}

/// Action totals over all episodes, successful or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixRow {
    pub method: Method,
    pub mode: MemoryMode,
    pub totals: ActionCounts,
    /// Fraction of executed actions that were robot skills.
    pub spatial_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: RunEcho,
    pub episodes: Vec<EpisodeSummary>,
    pub success: Vec<SuccessCell>,
    pub counts: Vec<CountRow>,
    pub mix: Vec<MixRow>,
}

fn sum_counts<'a>(it: impl Iterator<Item = &'a ActionCounts>) -> ActionCounts {
    it.fold(ActionCounts::default(), |mut a, c| {
        a.temporal_query += c.temporal_query;
        a.perception += c.perception;
        a.navigation += c.navigation;
        a.manipulation += c.manipulation;
        a
    })
}

impl SuiteReport {
    pub fn from_records(records: &[crate::runner::EpisodeRecord], config: RunEcho) -> Self {
        Self::from_summaries(records.iter().map(EpisodeSummary::from).collect(), config)
    }

    pub fn from_summaries(episodes: Vec<EpisodeSummary>, config: RunEcho) -> Self {
        let mut by_cell: BTreeMap<(Method, MemoryMode, TaskType, TaskFamily), (usize, usize)> = BTreeMap::new();
        let mut by_type: BTreeMap<(Method, MemoryMode, TaskType), Vec<&EpisodeSummary>> = BTreeMap::new();
        let mut by_run: BTreeMap<(Method, MemoryMode), Vec<&EpisodeSummary>> = BTreeMap::new();
        for e in &episodes {
            let cell = by_cell.entry((e.method, e.mode, e.task_type, e.family)).or_default();
            cell.0 += 1;
            cell.1 += usize::from(e.success);
            by_type.entry((e.method, e.mode, e.task_type)).or_default().push(e);
            by_run.entry((e.method, e.mode)).or_default().push(e);
        }
        let success = by_cell
            .into_iter()
            .map(|((method, mode, task_type, family), (n, k))| {
                let (ci_low, ci_high) = wilson(k, n);
                SuccessCell {
                    method,
                    mode,
                    task_type,
                    family,
                    episodes: n,
                    successes: k,
                    rate: k as f64 / n as f64,
                    ci_low,
                    ci_high,
                }
            })
            .collect();
        let counts = by_type
            .into_iter()
            .map(|((method, mode, task_type), eps)| {
                let ok: Vec<_> = eps.into_iter().filter(|e| e.success).collect();
                let n = ok.len();
                let t = sum_counts(ok.iter().map(|e| &e.action_counts));
                let opt: u32 = ok.iter().map(|e| optimal_physical(&e.optimal)).sum();
                let mean = |v: u32| if n == 0 { 0.0 } else { f64::from(v) / n as f64 };
                let physical = mean(t.physical());
                let optimal = mean(opt);
                CountRow {
                    method,
                    mode,
                    task_type,
                    successes: n,
                    temporal_query: mean(t.temporal_query),
                    perception: mean(t.perception),
                    navigation: mean(t.navigation),
                    manipulation: mean(t.manipulation),
                    physical,
                    optimal_physical: optimal,
                    ratio_to_optimal: if optimal > 0.0 { physical / optimal } else { 0.0 },
                }
            })
            .collect();
        let mix = by_run
            .into_iter()
            .map(|((method, mode), eps)| {
                let totals = sum_counts(eps.iter().map(|e| &e.action_counts));
                let all = totals.total();
                MixRow {
                    method,
                    mode,
                    totals,
                    spatial_share: if all == 0 {
                        0.0
                    } else {
                        f64::from(totals.physical()) / f64::from(all)
                    },
                }
            })
            .collect();
        Self {
            config,
            episodes,
            success,
            counts,
            mix,
        }
    }

    pub fn cell(&self, method: Method, mode: MemoryMode, task_type: TaskType, family: TaskFamily) -> Option<&SuccessCell> {
        self.success
            .iter()
            .find(|c| c.method == method && c.mode == mode && c.task_type == task_type && c.family == family)
    }

    /// Success rate pooled over every cell of `method` and `mode`.
    pub fn overall(&self, method: Method, mode: MemoryMode) -> Option<f64> {
        let (n, k) = self
            .success
            .iter()
            .filter(|c| c.method == method && c.mode == mode)
            .fold((0, 0), |(n, k), c| (n + c.episodes, k + c.successes));
        (n > 0).then(|| k as f64 / n as f64)
    }

    pub fn mix_row(&self, method: Method, mode: MemoryMode) -> Option<&MixRow> {
        self.mix.iter().find(|m| m.method == method && m.mode == mode)
    }

    pub fn count_row(&self, method: Method, mode: MemoryMode, task_type: TaskType) -> Option<&CountRow> {
        self.counts
            .iter()
            .find(|c| c.method == method && c.mode == mode && c.task_type == task_type)
    }

    /// Success cells as comma-separated values with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,mode,type,family,episodes,successes,rate,ci_low,ci_high\n");
        for c in &self.success {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.6},{:.6},{:.6}",
                c.method.as_str(),
                c.mode.as_str(),
                c.task_type.as_str(),
                c.family.as_str(),
                c.episodes,
                c.successes,
                c.rate,
                c.ci_low,
                c.ci_high
            );
        }
        out
    }

    /// Aligned-column text rendering: one success table per task type, then
    /// the per-successful-run action counts and the overall action mix.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let runs: Vec<(Method, MemoryMode)> = {
            let mut v: Vec<_> = self.success.iter().map(|c| (c.method, c.mode)).collect();
            v.sort();
            v.dedup();
            v
        };
        for tt in [TaskType::Visible, TaskType::Interactive, TaskType::Commonsense] {
            if !self.success.iter().any(|c| c.task_type == tt) {
                continue;
            }
            let families: Vec<TaskFamily> = if tt == TaskType::Commonsense {
                vec![TaskFamily::Commonsense]
            } else {
                TaskFamily::MEMORY.to_vec()
            };
            let _ = writeln!(out, "Success rate ({}), 95% Wilson interval", tt.as_str());
            let mut header = format!("{:<12} {:<10}", "Method", "Mode");
            for f in &families {
                let _ = write!(header, " {:<17}", f.abbrev());
            }
            let _ = writeln!(out, "{}", header.trim_end());
            for &(m, mode) in &runs {
                let mut row = format!("{:<12} {:<10}", m.label(), mode.as_str());
                for &f in &families {
                    let text = match self.cell(m, mode, tt, f) {
                        Some(c) => format!("{:.2} [{:.2},{:.2}]", c.rate, c.ci_low, c.ci_high),
                        None => "-".into(),
                    };
                    let _ = write!(row, " {text:<17}");
                }
                let _ = writeln!(out, "{}", row.trim_end());
            }
            out.push('\n');
        }
        let _ = writeln!(out, "Actions per successful run");
        let _ = writeln!(
            out,
            "{:<12} {:<10} {:<12} {:>4} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}",
            "Method", "Mode", "Type", "n", "Temp", "Perc", "Nav", "Manip", "Phys", "Opt", "Ratio"
        );
        for r in &self.counts {
            let _ = writeln!(
                out,
                "{:<12} {:<10} {:<12} {:>4} {:>6.2} {:>6.2} {:>6.2} {:>6.2} {:>6.2} {:>6.2} {:>6.2}",
                r.method.label(),
                r.mode.as_str(),
                r.task_type.as_str(),
                r.successes,
                r.temporal_query,
                r.perception,
                r.navigation,
                r.manipulation,
                r.physical,
                r.optimal_physical,
                r.ratio_to_optimal
            );
        }
        out.push('\n');
        let _ = writeln!(out, "Action mix, all episodes");
        let _ = writeln!(
            out,
            "{:<12} {:<10} {:>6} {:>6} {:>6} {:>6} {:>8}",
            "Method", "Mode", "Temp", "Perc", "Nav", "Manip", "Spatial"
        );
        for r in &self.mix {
            let _ = writeln!(
                out,
                "{:<12} {:<10} {:>6} {:>6} {:>6} {:>6} {:>8.3}",
                r.method.label(),
                r.mode.as_str(),
                r.totals.temporal_query,
                r.totals.perception,
                r.totals.navigation,
                r.totals.manipulation,
                r.spatial_share
            );
        }
        out
    }
}

fn optimal_physical(o: &OptimalCounts) -> u32 {
    o.total()
}
