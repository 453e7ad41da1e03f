use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recall_core::{Action, Outcome};
use recall_homesim::{NodeKind, Relation, SceneGraph};

use super::plan::{choose_entity, detect, navigate, open, pick, Descriptor};
use super::{Policy, PolicyContext, PolicyDecision};
use crate::parse::{last_detection, parse_instruction, TargetQuery, TimeRef};
use crate::tools::PICK;

/// Resolves the instruction against per-day ground-truth scene graphs and
/// makes a single attempt at the resolved object's last known place.
/// Scene graphs carry labels but not which physical landmark a node is, so
/// identical receptacles in one room are chosen between at random.
pub struct SceneGraphPolicy {
    graphs: Vec<SceneGraph>,
    rng: ChaCha8Rng,
    queue: VecDeque<Action>,
    plan: Option<(Descriptor, String)>,
}

impl SceneGraphPolicy {
    /// `graphs[d]` is the end-of-day snapshot for patrol day `d`.
    pub fn new(graphs: Vec<SceneGraph>, seed: u64) -> Self {
        Self {
            graphs,
            rng: ChaCha8Rng::seed_from_u64(seed),
            queue: VecDeque::new(),
            plan: None,
        }
    }

    fn landmark_label_of<'a>(g: &'a SceneGraph, object: &str) -> Option<(&'a str, Relation, &'a str)> {
        let e = g.placement(object)?;
        Some((g.node(&e.to)?.label.as_str(), e.relation, e.to.as_str()))
    }

    /// Object node the instruction refers to.
    fn resolve(&self, q: &TargetQuery) -> Result<String, String> {
        let last = self.graphs.last().ok_or("no scene graphs")?;
        let candidates: Vec<&str> = last
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Object && n.label == q.class && q.attributes.iter().all(|a| n.attributes.contains(a)))
            .map(|n| n.id.as_str())
            .collect();
        let at_place = |g: &SceneGraph, id: &str, place: &str| {
            Self::landmark_label_of(g, id).is_some_and(|(label, _, _)| label == place)
        };
        let chosen: Vec<&str> = match (&q.place, q.time) {
            (None, _) => candidates,
            (Some(p), TimeRef::Now) => candidates.into_iter().filter(|id| at_place(last, id, p)).collect(),
            (Some(p), TimeRef::DaysAgo(n)) => {
                let day = (self.graphs.len() as u64).checked_sub(n).ok_or("day before the patrol")?;
                let g = &self.graphs[day as usize];
                candidates.into_iter().filter(|id| at_place(g, id, p)).collect()
            }
            (Some(p), TimeRef::Usually) => {
                let mut days: BTreeMap<&str, usize> = BTreeMap::new();
                for id in &candidates {
                    days.insert(id, self.graphs.iter().filter(|g| at_place(g, id, p)).count());
                }
                let best = days.values().copied().max().unwrap_or(0);
                if best == 0 {
                    Vec::new()
                } else {
                    candidates.into_iter().filter(|id| days[id] == best).collect()
                }
            }
        };
        match chosen.as_slice() {
            [] => Err("no scene-graph node matches the instruction".into()),
            [one, ..] => Ok((*one).to_string()),
        }
    }
}

impl Policy for SceneGraphPolicy {
    fn name(&self) -> &str {
        "sg_s"
    }

    fn decide(&mut self, ctx: &PolicyContext<'_>) -> PolicyDecision {
        if self.plan.is_none() {
            let Some(q) = parse_instruction(ctx.instruction) else {
                return PolicyDecision::abort("instruction not understood");
            };
            let node = match self.resolve(&q) {
                Ok(n) => n,
                Err(e) => return PolicyDecision::abort(e),
            };
            let last = self.graphs.last().expect("resolve checked");
            let Some((label, relation, lm_node)) = Self::landmark_label_of(last, &node) else {
                return PolicyDecision::abort("resolved object has no placement");
            };
            let room = last.room_of(lm_node).map(|r| r.label.replace(' ', "_"));
            let options: Vec<String> = ctx
                .schema
                .landmarks_labeled(label, room.as_deref())
                .map(|l| l.id.clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let Some(landmark) = options.choose(&mut self.rng).cloned() else {
                return PolicyDecision::abort(format!("no landmark labeled {label}"));
            };
            let attrs = last.node(&node).map(|n| n.attributes.clone()).unwrap_or_default();
            self.queue.push_back(navigate(&landmark));
            self.queue.push_back(detect());
            if relation == Relation::Inside {
                self.queue.push_back(open(&landmark));
                self.queue.push_back(detect());
            }
            self.plan = Some((
                Descriptor {
                    class: q.class.clone(),
                    attributes: attrs,
                },
                landmark,
            ));
        }
        if let Some(last) = ctx.steps.last() {
            if matches!(last.outcome, Outcome::SkillResult { success: false, .. } | Outcome::Rejected { .. }) {
                return PolicyDecision::abort("one-shot plan failed");
            }
        }
        if let Some(a) = self.queue.pop_front() {
            return PolicyDecision::because(a, "one-shot plan");
        }
        let (d, landmark) = self.plan.as_ref().expect("planned");
        let entities = last_detection(ctx.steps).unwrap_or(&[]);
        match choose_entity(entities, d, Some(landmark), &[]) {
            Some(e) if ctx.steps.last().is_some_and(|s| s.action.tool != PICK) => PolicyDecision::act(pick(&e.entity_id)),
            _ => PolicyDecision::abort("target not found at resolved landmark"),
        }
    }
}
