//! Policies map `(instruction, trace, remaining budget, schema)` to the next
//! action. They see nothing else: world and memory are reachable only
//! through executed actions.

mod external;
mod plan;
mod random;
mod sg_s;
mod star;
mod tr_s;

use recall_core::{Action, Step};
use serde::{Deserialize, Serialize};

use crate::tools::RegistrySchema;

pub use external::{
    ChatAdapter, ExternalPolicy, PlainAdapter, PolicyRequest, PolicyResponse, TraceEntry, WireAdapter, WireEnvironment,
    WIRE_VERSION,
};
pub use random::RandomPolicy;
pub use sg_s::SceneGraphPolicy;
pub use star::{PriorTable, StarConfig, StarPolicy};
pub use tr_s::TemporalRetrievalPolicy;

/// The only view of the episode a policy receives.
#[derive(Debug, Clone, Copy)]
pub struct PolicyContext<'a> {
    pub instruction: &'a str,
    pub steps: &'a [Step],
    pub remaining_budget: u32,
    pub schema: &'a RegistrySchema,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum PolicyDecision {
    Act {
        action: Action,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rationale: Option<String>,
    },
    Abort {
        reason: String,
    },
}

impl PolicyDecision {
    pub fn act(action: Action) -> Self {
        PolicyDecision::Act {
            action,
            rationale: None,
        }
    }

    pub fn because(action: Action, rationale: impl Into<String>) -> Self {
        PolicyDecision::Act {
            action,
            rationale: Some(rationale.into()),
        }
    }

    pub fn abort(reason: impl Into<String>) -> Self {
        PolicyDecision::Abort { reason: reason.into() }
    }
}

pub trait Policy {
    /// Name used in logs and reports.
    fn name(&self) -> &str;
    fn decide(&mut self, ctx: &PolicyContext<'_>) -> PolicyDecision;
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn decide(&mut self, ctx: &PolicyContext<'_>) -> PolicyDecision {
        (**self).decide(ctx)
    }
}
