use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskFamily {
    Class,
    Attribute,
    Spatial,
    SpatialTemporal,
    SpatialFrequentist,
    Commonsense,
}

impl TaskFamily {
    /// The five families used by visible and interactive tasks.
    pub const MEMORY: [TaskFamily; 5] = [
        TaskFamily::Class,
        TaskFamily::Attribute,
        TaskFamily::Spatial,
        TaskFamily::SpatialTemporal,
        TaskFamily::SpatialFrequentist,
    ];

    /// Column abbreviation used in report tables.
    pub fn abbrev(&self) -> &'static str {
        match self {
            TaskFamily::Class => "C",
            TaskFamily::Attribute => "A",
            TaskFamily::Spatial => "S",
            TaskFamily::SpatialTemporal => "ST",
            TaskFamily::SpatialFrequentist => "SF",
            TaskFamily::Commonsense => "CS",
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TaskFamily::Class => "class",
            TaskFamily::Attribute => "attribute",
            TaskFamily::Spatial => "spatial",
            TaskFamily::SpatialTemporal => "spatial_temporal",
            TaskFamily::SpatialFrequentist => "spatial_frequentist",
            TaskFamily::Commonsense => "commonsense",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    Visible,
    Interactive,
    Commonsense,
}

impl TaskType {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskType::Visible => "visible",
            TaskType::Interactive => "interactive",
            TaskType::Commonsense => "commonsense",
        }
    }
}

/// A natural-language request. Family and type are benchmark bookkeeping
/// and are never shown to policies; only `text` is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instruction {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<TaskFamily>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub task_type: Option<TaskType>,
}

impl Instruction {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            family: None,
            task_type: None,
        }
    }

    pub fn labeled(text: impl Into<String>, family: TaskFamily, task_type: TaskType) -> Self {
        Self {
            text: text.into(),
            family: Some(family),
            task_type: Some(task_type),
        }
    }
}
