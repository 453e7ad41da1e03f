use std::collections::BTreeMap;

use recall_core::{validate_action, ActionCategory, Instruction, Outcome, ToolDomain, WorkingMemory};
use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::policy::{Policy, PolicyContext, PolicyDecision};
use crate::tools::{RegistrySchema, PICK};

/// Step budget used throughout the evaluation.
pub const DEFAULT_BUDGET: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Retrieved,
    BudgetExhausted,
    PolicyAbort,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionCounts {
    pub temporal_query: u32,
    pub perception: u32,
    pub navigation: u32,
    pub manipulation: u32,
}

impl ActionCounts {
    pub fn add(&mut self, category: ActionCategory) {
        match category {
            ActionCategory::TemporalQuery => self.temporal_query += 1,
            ActionCategory::Perception => self.perception += 1,
            ActionCategory::Navigation => self.navigation += 1,
            ActionCategory::Manipulation => self.manipulation += 1,
        }
    }

    pub fn total(&self) -> u32 {
        self.temporal_query + self.physical()
    }

    /// Spatial (robot skill) actions.
    pub fn physical(&self) -> u32 {
        self.perception + self.navigation + self.manipulation
    }

    pub fn get(&self, domain: ToolDomain) -> u32 {
        match domain {
            ToolDomain::Temporal => self.temporal_query,
            ToolDomain::Spatial => self.physical(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub success: bool,
    pub steps_used: u32,
    pub trace: WorkingMemory,
    /// Category of each trace entry, aligned with `trace.steps()`.
    pub categories: Vec<ActionCategory>,
    /// Policy rationale per step (logged only).
    pub rationales: Vec<Option<String>>,
    pub action_counts: ActionCounts,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort_reason: Option<String>,
    /// Step indices (0-based) of successful picks of a wrong entity.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wrong_picks: Vec<u32>,
}

/// Runs one episode: ask the policy, validate, execute, append, until the
/// target is picked, the budget runs out, or the policy aborts. Invalid
/// actions are answered with a `Rejected` outcome and still use a step.
pub fn run_episode(
    instruction: &Instruction,
    target: &str,
    env: &mut Environment<'_>,
    schema: &RegistrySchema,
    policy: &mut dyn Policy,
    budget: u32,
) -> EpisodeResult {
    assert!(budget >= 1, "budget must be at least 1");
    let mut trace = WorkingMemory::new(instruction.clone(), budget);
    let mut categories = Vec::new();
    let mut rationales = Vec::new();
    let mut counts = ActionCounts::default();
    let mut wrong_picks = Vec::new();
    let mut termination = Termination::BudgetExhausted;
    let mut abort_reason = None;

    while trace.remaining_budget() > 0 {
        let ctx = PolicyContext {
            instruction: &instruction.text,
            steps: trace.steps(),
            remaining_budget: trace.remaining_budget(),
            schema,
        };
        let (action, rationale) = match policy.decide(&ctx) {
            PolicyDecision::Act { action, rationale } => (action, rationale),
            PolicyDecision::Abort { reason } => {
                termination = Termination::PolicyAbort;
                abort_reason = Some(reason);
                break;
            }
        };
        let category = env.category(&action);
        let outcome = match validate_action(&action, env.registry) {
            Ok(()) => env.execute(&action),
            Err(e) => Outcome::Rejected {
                diagnostics: e.diagnostics,
            },
        };
        let picked = (action.tool == PICK && outcome.is_success()).then(|| action.text("entity").map(str::to_string));
        counts.add(category);
        categories.push(category);
        rationales.push(rationale);
        trace.push(action, outcome);
        if let Some(entity) = picked.flatten() {
            if entity == target {
                termination = Termination::Retrieved;
                break;
            }
            wrong_picks.push(trace.len() as u32 - 1);
        }
    }

    EpisodeResult {
        success: termination == Termination::Retrieved,
        steps_used: trace.len() as u32,
        trace,
        categories,
        rationales,
        action_counts: counts,
        termination,
        abort_reason,
        wrong_picks,
    }
}

/// Tallies per category over a finished trace (used to cross-check logs).
pub fn tally(categories: &[ActionCategory]) -> BTreeMap<ActionCategory, u32> {
    let mut m = BTreeMap::new();
    for c in categories {
        *m.entry(*c).or_insert(0) += 1;
    }
    m
}
