use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recall_core::{Action, Outcome};

use super::{Policy, PolicyContext, PolicyDecision};
use crate::tools::{DETECT, NAVIGATE, PICK};

/// Wanders: navigate to a random landmark, detect, and pick anything whose
/// class is mentioned in the instruction. Never touches memory and never
/// opens receptacles.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
    tried: BTreeSet<String>,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            tried: BTreeSet::new(),
        }
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn decide(&mut self, ctx: &PolicyContext<'_>) -> PolicyDecision {
        let words: BTreeSet<String> = ctx
            .instruction
            .to_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_string)
            .collect();
        if let Some(last) = ctx.steps.last() {
            match (&last.action.tool[..], &last.outcome) {
                (DETECT, Outcome::Perception { detection }) => {
                    if let Some(e) = detection
                        .entities
                        .iter()
                        .find(|e| words.contains(&e.class_label) && !self.tried.contains(&e.entity_id))
                    {
                        self.tried.insert(e.entity_id.clone());
                        return PolicyDecision::act(Action::new(PICK).arg("entity", e.entity_id.as_str()));
                    }
                }
                (NAVIGATE, o) if o.is_success() => return PolicyDecision::act(Action::new(DETECT)),
                _ => {}
            }
        }
        match ctx.schema.landmarks.choose(&mut self.rng) {
            Some(l) => PolicyDecision::act(Action::new(NAVIGATE).arg("landmark", l.id.as_str())),
            None => PolicyDecision::abort("no landmarks to visit"),
        }
    }
}
