use std::fmt;
use std::str::FromStr;

use recall_core::{ActionCategory, Instruction, TaskFamily, TaskType};
use recall_homesim::Schedule;
use serde::{Deserialize, Serialize};

/// Minimal physical actions needed to retrieve the target from task time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalCounts {
    pub perception: u32,
    pub navigation: u32,
    pub manipulation: u32,
}

impl OptimalCounts {
    pub const VISIBLE: OptimalCounts = OptimalCounts {
        perception: 1,
        navigation: 1,
        manipulation: 1,
    };
    pub const INTERACTIVE: OptimalCounts = OptimalCounts {
        perception: 2,
        navigation: 1,
        manipulation: 2,
    };

    pub fn total(&self) -> u32 {
        self.perception + self.navigation + self.manipulation
    }

    pub fn add(&mut self, c: ActionCategory) {
        match c {
            ActionCategory::Perception => self.perception += 1,
            ActionCategory::Navigation => self.navigation += 1,
            ActionCategory::Manipulation => self.manipulation += 1,
            ActionCategory::TemporalQuery => {}
        }
    }
}

/// What makes a task hard, recorded at generation so it can be re-checked
/// against ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hazard {
    /// The target is the only instance of its class.
    UniqueClass,
    /// Another instance of the class differs only in attributes.
    AttributeTwin { distractor: String },
    /// Another instance of the class sits at a different landmark.
    SpatialPair { distractor: String, landmark: String },
    /// The target was at `landmark` on `day` and has moved since.
    MovedSince { day: u64, landmark: String, distractor: Option<String> },
    /// The target spent most patrol days at `landmark` but was elsewhere on
    /// the last one.
    UsualPlace { landmark: String, distractor: Option<String> },
    /// The target never appears in the patrol stream.
    NeverObserved,
}

/// The target ends up in `receptacle`, which has an identical twin in the
/// same room.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinReceptacle {
    pub receptacle: String,
    pub twin: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub instruction: Instruction,
    /// Ground-truth entity id.
    pub target: String,
    pub scene_id: u8,
    pub layout_seed: u64,
    pub patrol_days: u64,
    pub ticks_per_day: u64,
    /// Complete schedule: background life plus the task's own events.
    pub schedule: Schedule,
    pub hazard: Hazard,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receptacle: Option<TwinReceptacle>,
    pub optimal: OptimalCounts,
}

impl TaskSpec {
    pub fn family(&self) -> TaskFamily {
        self.instruction.family.unwrap_or(TaskFamily::Class)
    }

    pub fn task_type(&self) -> TaskType {
        self.instruction.task_type.unwrap_or(TaskType::Visible)
    }

    pub fn task_time(&self) -> u64 {
        self.patrol_days * self.ticks_per_day
    }

    /// Seed for anything random that depends on this task.
    pub fn seed(&self) -> u64 {
        let id = self
            .id
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
        recall_core::derive_seed(self.layout_seed, id)
    }
}

/// Policies compared by the suite runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Random,
    SgS,
    TrS,
    Star,
    Llm,
}

impl Method {
    pub const SCRIPTED: [Method; 4] = [Method::Random, Method::SgS, Method::TrS, Method::Star];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::SgS => "sg_s",
            Method::TrS => "tr_s",
            Method::Star => "star",
            Method::Llm => "llm",
        }
    }

    /// Display name used in tables.
    pub fn label(&self) -> &'static str {
        match self {
            Method::Random => "Random",
            Method::SgS => "SG+S",
            Method::TrS => "TR+S",
            Method::Star => "STAR",
            Method::Llm => "STAR (LLM)",
        }
    }

    pub fn uses_memory(&self) -> bool {
        matches!(self, Method::TrS | Method::Star | Method::Llm)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "random" => Ok(Method::Random),
            "sg_s" | "sg+s" => Ok(Method::SgS),
            "tr_s" | "tr+s" => Ok(Method::TrS),
            "star" | "star_scripted" => Ok(Method::Star),
            "llm" => Ok(Method::Llm),
            other => Err(format!("unknown method {other:?} (expected random, sg_s, tr_s, star or llm)")),
        }
    }
}
