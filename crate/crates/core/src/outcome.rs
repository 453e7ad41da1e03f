use serde::{Deserialize, Serialize};

use crate::action::FieldError;
use crate::observation::{Detection, SymbolicObservation};
use crate::record::RecordView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Retrieval,
    Perception,
    SkillResult,
    /// The action never ran because it failed validation.
    Rejected,
}

/// The result `y_k` of executing one action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Retrieval {
        hits: Vec<RecordView>,
    },
    RawObservation {
        record_index: usize,
        observation: SymbolicObservation,
    },
    Perception {
        detection: Detection,
    },
    SkillResult {
        success: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
    Rejected {
        diagnostics: Vec<FieldError>,
    },
}

impl Outcome {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::Retrieval { .. } | Outcome::RawObservation { .. } => OutcomeKind::Retrieval,
            Outcome::Perception { .. } => OutcomeKind::Perception,
            Outcome::SkillResult { .. } => OutcomeKind::SkillResult,
            Outcome::Rejected { .. } => OutcomeKind::Rejected,
        }
    }

    pub fn success() -> Self {
        Outcome::SkillResult {
            success: true,
            reason: None,
        }
    }

    pub fn failure(reason: impl Into<String>) -> Self {
        Outcome::SkillResult {
            success: false,
            reason: Some(reason.into()),
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::SkillResult { success: true, .. })
    }
}
