use std::collections::{BTreeMap, BTreeSet, VecDeque};

use recall_core::{Action, Outcome};
use serde::{Deserialize, Serialize};

use super::plan::{
    choose_entity, detect, navigate, open, pick, rank_hypotheses, resolve_descriptor, Hypothesis,
};
use super::{Policy, PolicyContext, PolicyDecision};
use crate::parse::{memory_sightings, parse_instruction, TargetQuery, TimeRef};
use crate::tools::{RegistrySchema, DETECT, FETCH_RAW, NAVIGATE, PICK, SEMANTIC_QUERY, TEMPORAL_WINDOW_QUERY};

/// Where never-seen objects of a class are likely kept: class -> rooms,
/// most likely first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorTable(pub BTreeMap<String, Vec<String>>);

impl PriorTable {
    pub fn household() -> Self {
        let pairs = [
            ("milk", "kitchen"),
            ("cereal", "kitchen"),
            ("socks", "bedroom"),
            ("toothpaste", "bathroom"),
            ("stapler", "study"),
        ];
        Self(pairs.iter().map(|(c, r)| (c.to_string(), vec![r.to_string()])).collect())
    }

    pub fn rooms(&self, class: &str) -> &[String] {
        self.0.get(class).map_or(&[], Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarConfig {
    /// Once the remaining budget is at or below this, no more memory
    /// queries: commit to the best remaining hypothesis.
    pub commit_threshold: u32,
    /// Result count for the semantic requery after a failed probe.
    pub semantic_r: usize,
    pub prior: PriorTable,
}

impl Default for StarConfig {
    fn default() -> Self {
        Self {
            commit_threshold: 4,
            semantic_r: 30,
            prior: PriorTable::household(),
        }
    }
}

/// Scripted version of the unified search loop: recall where the target
/// was seen, go look, and fall back on memory again (or on a class prior)
/// when the world disagrees.
pub struct StarPolicy {
    cfg: StarConfig,
    query: Option<TargetQuery>,
    windows_done: Vec<(u64, u64)>,
    history_checked: bool,
    requeried: bool,
    fetched: BTreeSet<usize>,
    tried: BTreeSet<String>,
    cleared_rooms: BTreeSet<String>,
    prior_added: bool,
    prior: Vec<Hypothesis>,
    current: Option<Hypothesis>,
    queue: VecDeque<Action>,
    excluded: Vec<String>,
}

impl StarPolicy {
    pub fn new(cfg: StarConfig) -> Self {
        Self {
            cfg,
            query: None,
            windows_done: Vec::new(),
            history_checked: false,
            requeried: false,
            fetched: BTreeSet::new(),
            tried: BTreeSet::new(),
            cleared_rooms: BTreeSet::new(),
            prior_added: false,
            prior: Vec::new(),
            current: None,
            queue: VecDeque::new(),
            excluded: Vec::new(),
        }
    }

    fn window(day_start: u64, day_end: u64, tpd: u64) -> Action {
        Action::new(TEMPORAL_WINDOW_QUERY)
            .arg("day_start", day_start)
            .arg("day_end", day_end)
            .arg("r", (day_end - day_start + 1) * tpd)
    }

    fn prior_hypotheses(&self, q: &TargetQuery, schema: &RegistrySchema) -> Vec<Hypothesis> {
        let mut rooms: Vec<String> = self.cfg.prior.rooms(&q.class).to_vec();
        for l in &schema.landmarks {
            if !rooms.contains(&l.room_id) {
                rooms.push(l.room_id.clone());
            }
        }
        let mut out = Vec::new();
        for room in rooms {
            let in_room: Vec<_> = schema.landmarks.iter().filter(|l| l.room_id == room).collect();
            let receptacles: Vec<_> = in_room.iter().filter(|l| l.receptacle).collect();
            if receptacles.is_empty() {
                if let Some(l) = in_room.first() {
                    out.push(Hypothesis {
                        landmark: l.id.clone(),
                        contained: false,
                        t: 0,
                        record_index: None,
                    });
                }
            }
            for l in receptacles {
                out.push(Hypothesis {
                    landmark: l.id.clone(),
                    contained: true,
                    t: 0,
                    record_index: None,
                });
            }
        }
        out
    }

    fn room_of<'a>(schema: &'a RegistrySchema, landmark: &str) -> Option<&'a str> {
        schema.landmark(landmark).map(|l| l.room_id.as_str())
    }

    fn viable(&self, h: &Hypothesis, schema: &RegistrySchema) -> bool {
        if self.tried.contains(&h.landmark) {
            return false;
        }
        // An open-air hypothesis in a room already scanned without success
        // is already refuted.
        h.contained || !Self::room_of(schema, &h.landmark).is_some_and(|r| self.cleared_rooms.contains(r))
    }
}

impl Policy for StarPolicy {
    fn name(&self) -> &str {
        "star"
    }

    fn decide(&mut self, ctx: &PolicyContext<'_>) -> PolicyDecision {
        if self.query.is_none() {
            match parse_instruction(ctx.instruction) {
                Some(q) => self.query = Some(q),
                None => return PolicyDecision::abort("instruction not understood"),
            }
        }
        let q = self.query.clone().expect("parsed above");
        let schema = ctx.schema;
        let committed = ctx.remaining_budget <= self.cfg.commit_threshold;
        let sightings = memory_sightings(ctx.steps);
        let current_day = schema.memory.as_ref().map_or(0, |m| m.current_day);
        let descriptor = resolve_descriptor(&q, &sightings, current_day);

        // React to the last outcome.
        if let Some(last) = ctx.steps.last() {
            match (&last.action.tool[..], &last.outcome) {
                (PICK, o) if o.is_success() => {
                    self.excluded.extend(last.action.text("entity").map(str::to_string));
                }
                (DETECT, Outcome::Perception { detection }) => {
                    let expected = self.current.as_ref().map(|h| h.landmark.as_str());
                    if let Some(e) = choose_entity(&detection.entities, &descriptor, expected, &self.excluded) {
                        self.queue.clear();
                        return PolicyDecision::because(pick(&e.entity_id), "target in view");
                    }
                    let opened_here = ctx.steps.iter().rev().take_while(|s| s.action.tool != NAVIGATE).any(|s| {
                        s.action.tool == crate::tools::OPEN && s.outcome.is_success()
                    });
                    if !self.queue.front().is_some_and(|a| a.tool == crate::tools::OPEN) || opened_here {
                        self.cleared_rooms.insert(detection.from_pose.room_id.clone());
                    }
                }
                (_, Outcome::SkillResult { success: false, .. }) | (_, Outcome::Rejected { .. }) => {
                    self.queue.clear();
                }
                _ => {}
            }
        }
        if let Some(a) = self.queue.pop_front() {
            return PolicyDecision::because(a, "probing hypothesis");
        }

        // Recall.
        if let Some(mem) = schema.memory.as_ref().filter(|m| m.records > 0 && !committed) {
            let last_day = mem.days.saturating_sub(1);
            if self.windows_done.is_empty() {
                let start = match q.time {
                    TimeRef::Now => last_day,
                    TimeRef::DaysAgo(n) => mem.current_day.saturating_sub(n).min(last_day),
                    TimeRef::Usually => 0,
                };
                self.windows_done.push((start, last_day));
                return PolicyDecision::because(Self::window(start, last_day, mem.ticks_per_day), "recent history");
            }
            let seen = sightings.iter().any(|s| descriptor.matches(&s.class, &s.attributes));
            let earliest = self.windows_done.iter().map(|w| w.0).min().unwrap_or(0);
            if !seen && !self.history_checked && earliest > 0 {
                self.history_checked = true;
                self.windows_done.push((0, earliest - 1));
                return PolicyDecision::because(Self::window(0, earliest - 1, mem.ticks_per_day), "older history");
            }
        }

        let mut hyps: Vec<Hypothesis> = rank_hypotheses(&q, &descriptor, &sightings, schema)
            .into_iter()
            .filter(|h| self.viable(h, schema))
            .collect();
        let probed_memory = !self.tried.is_empty() && !self.prior_added;
        if probed_memory && !committed && !self.requeried && schema.has_tool(SEMANTIC_QUERY) {
            self.requeried = true;
            return PolicyDecision::because(
                Action::new(SEMANTIC_QUERY)
                    .arg("text", descriptor.phrase())
                    .arg("r", self.cfg.semantic_r),
                "requery after failed probe",
            );
        }
        if hyps.is_empty() {
            if !self.prior_added {
                self.prior_added = true;
                self.prior = self.prior_hypotheses(&q, schema);
            }
            hyps = self.prior.iter().filter(|h| self.viable(h, schema)).cloned().collect();
        }
        let Some(h) = hyps.into_iter().next() else {
            return PolicyDecision::abort("no place left to search");
        };

        // Twin receptacles: read the raw observation to learn which one.
        if h.contained && !committed {
            if let Some(idx) = h.record_index {
                let label = schema.landmark(&h.landmark).map(|l| l.label.clone()).unwrap_or_default();
                let room = Self::room_of(schema, &h.landmark).unwrap_or_default();
                let twins = schema.landmarks_labeled(&label, Some(room)).count() > 1;
                if twins && self.fetched.insert(idx) && schema.has_tool(FETCH_RAW) {
                    return PolicyDecision::because(
                        Action::new(FETCH_RAW).arg("record_index", idx),
                        "which receptacle held it",
                    );
                }
            }
        }

        self.tried.insert(h.landmark.clone());
        self.queue.push_back(detect());
        if h.contained {
            self.queue.push_back(open(&h.landmark));
            self.queue.push_back(detect());
        }
        let landmark = h.landmark.clone();
        self.current = Some(h);
        PolicyDecision::because(navigate(&landmark), "best remaining hypothesis")
    }
}
