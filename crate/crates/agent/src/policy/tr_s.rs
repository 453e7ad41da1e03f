use std::collections::VecDeque;

use recall_core::{Action, Outcome};

use super::plan::{choose_entity, detect, navigate, open, pick, rank_hypotheses, resolve_descriptor, Descriptor};
use super::{Policy, PolicyContext, PolicyDecision};
use crate::parse::{last_detection, memory_sightings, parse_instruction, TargetQuery, TimeRef};
use crate::tools::{SEMANTIC_QUERY, SPATIAL_QUERY, TEMPORAL_WINDOW_QUERY};

const SPATIAL_R: usize = 20;
const SPATIAL_RADIUS: f64 = 1.0;

enum Stage {
    Probe(usize),
    Plan,
    Execute,
}

/// Temporal retrieval followed by a one-shot plan: a fixed probe set
/// (semantic query on the object phrase, a day-window query when the
/// instruction names a day, a spatial query around the best semantic hit),
/// then navigate / (open) / detect / pick at the single best hypothesis,
/// with no replanning.
pub struct TemporalRetrievalPolicy {
    stage: Stage,
    query: Option<TargetQuery>,
    descriptor: Option<Descriptor>,
    landmark: Option<String>,
    queue: VecDeque<Action>,
}

impl Default for TemporalRetrievalPolicy {
    fn default() -> Self {
        Self::new()
    }
}

impl TemporalRetrievalPolicy {
    pub fn new() -> Self {
        Self {
            stage: Stage::Probe(0),
            query: None,
            descriptor: None,
            landmark: None,
            queue: VecDeque::new(),
        }
    }

    fn probes(q: &TargetQuery) -> Vec<&'static str> {
        let mut probes = vec!["semantic"];
        if matches!(q.time, TimeRef::DaysAgo(_)) {
            probes.push("window");
        }
        probes.push("spatial");
        probes
    }

    fn probe(&self, i: usize, ctx: &PolicyContext<'_>, q: &TargetQuery) -> Option<Action> {
        let mem = ctx.schema.memory.as_ref()?;
        match *Self::probes(q).get(i)? {
            "semantic" => {
                let mut text = q.object_phrase();
                if let Some(p) = &q.place {
                    text = format!("{text} {p}");
                }
                Some(Action::new(SEMANTIC_QUERY).arg("text", text).arg("r", mem.records.max(1)))
            }
            "window" => {
                let TimeRef::DaysAgo(n) = q.time else { return None };
                let day = mem.current_day.saturating_sub(n);
                Some(
                    Action::new(TEMPORAL_WINDOW_QUERY)
                        .arg("day_start", day)
                        .arg("day_end", day)
                        .arg("r", mem.ticks_per_day),
                )
            }
            _ => {
                let best = ctx.steps.iter().find_map(|s| match &s.outcome {
                    Outcome::Retrieval { hits } if s.action.tool == SEMANTIC_QUERY => hits.first().cloned(),
                    _ => None,
                })?;
                Some(
                    Action::new(SPATIAL_QUERY)
                        .arg("x", best.pose.position[0])
                        .arg("y", best.pose.position[1])
                        .arg("radius", SPATIAL_RADIUS)
                        .arg("r", SPATIAL_R),
                )
            }
        }
    }
}

impl Policy for TemporalRetrievalPolicy {
    fn name(&self) -> &str {
        "tr_s"
    }

    fn decide(&mut self, ctx: &PolicyContext<'_>) -> PolicyDecision {
        if self.query.is_none() {
            match parse_instruction(ctx.instruction) {
                Some(q) => self.query = Some(q),
                None => return PolicyDecision::abort("instruction not understood"),
            }
        }
        let q = self.query.clone().expect("parsed above");
        let Some(mem) = ctx.schema.memory.clone() else {
            return PolicyDecision::abort("no long-term memory available");
        };
        loop {
            match self.stage {
                Stage::Probe(i) if i >= Self::probes(&q).len() => self.stage = Stage::Plan,
                Stage::Probe(i) => {
                    self.stage = Stage::Probe(i + 1);
                    if let Some(a) = self.probe(i, ctx, &q) {
                        return PolicyDecision::because(a, "fixed probe set");
                    }
                }
                Stage::Plan => {
                    let sightings = memory_sightings(ctx.steps);
                    let d = resolve_descriptor(&q, &sightings, mem.current_day);
                    let hyps = rank_hypotheses(&q, &d, &sightings, ctx.schema);
                    let Some(h) = hyps.first() else {
                        return PolicyDecision::abort("no remembered sighting of the target");
                    };
                    self.queue.push_back(navigate(&h.landmark));
                    self.queue.push_back(detect());
                    if h.contained {
                        self.queue.push_back(open(&h.landmark));
                        self.queue.push_back(detect());
                    }
                    self.landmark = Some(h.landmark.clone());
                    self.descriptor = Some(d);
                    self.stage = Stage::Execute;
                }
                Stage::Execute => {
                    if let Some(last) = ctx.steps.last() {
                        if matches!(last.outcome, Outcome::SkillResult { success: false, .. } | Outcome::Rejected { .. }) {
                            return PolicyDecision::abort("one-shot plan failed");
                        }
                    }
                    if let Some(a) = self.queue.pop_front() {
                        return PolicyDecision::because(a, "one-shot plan");
                    }
                    let d = self.descriptor.as_ref().expect("set in plan stage");
                    let entities = last_detection(ctx.steps).unwrap_or(&[]);
                    return match choose_entity(entities, d, self.landmark.as_deref(), &[]) {
                        Some(e) if ctx.steps.last().is_some_and(|s| s.action.tool != crate::tools::PICK) => {
                            PolicyDecision::act(pick(&e.entity_id))
                        }
                        _ => PolicyDecision::abort("target not found at hypothesized landmark"),
                    };
                }
            }
        }
    }
}
