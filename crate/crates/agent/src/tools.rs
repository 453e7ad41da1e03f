//! The unified tool set and the machine-readable schema handed to policies.

use recall_core::{ActionCategory, ArgKind, ArgSpec, OutputKind, ToolRegistry, ToolSchema};
use recall_homesim::WorldState;
use recall_memstore::LongTermMemory;
use serde::{Deserialize, Serialize};

pub const SEMANTIC_QUERY: &str = "semantic_query";
pub const TEMPORAL_QUERY: &str = "temporal_query";
pub const TEMPORAL_WINDOW_QUERY: &str = "temporal_window_query";
pub const SPATIAL_QUERY: &str = "spatial_query";
pub const FETCH_RAW: &str = "fetch_raw";
pub const NAVIGATE: &str = "navigate";
pub const DETECT: &str = "detect";
pub const OPEN: &str = "open";
pub const PICK: &str = "pick";

fn tool(name: &str, category: ActionCategory, output: OutputKind, description: &str, args: Vec<ArgSpec>) -> ToolSchema {
    ToolSchema {
        name: name.into(),
        category,
        output,
        description: description.into(),
        args,
    }
}

fn r_arg() -> ArgSpec {
    ArgSpec::optional("r", ArgKind::Integer).describe("number of records to return (default 5)")
}

pub fn temporal_tools() -> Vec<ToolSchema> {
    use ActionCategory::TemporalQuery as T;
    use OutputKind::Retrieval as R;
    vec![
        tool(
            SEMANTIC_QUERY,
            T,
            R,
            "records whose captions are most similar to the text",
            vec![ArgSpec::required("text", ArgKind::Text), r_arg()],
        ),
        tool(
            TEMPORAL_QUERY,
            T,
            R,
            "records nearest in time to a tick",
            vec![ArgSpec::required("timestamp", ArgKind::Integer), r_arg()],
        ),
        tool(
            TEMPORAL_WINDOW_QUERY,
            T,
            R,
            "records from days day_start..=day_end, newest first",
            vec![
                ArgSpec::required("day_start", ArgKind::Integer),
                ArgSpec::required("day_end", ArgKind::Integer),
                r_arg(),
            ],
        ),
        tool(
            SPATIAL_QUERY,
            T,
            R,
            "records taken within radius meters of (x, y), nearest first",
            vec![
                ArgSpec::required("x", ArgKind::Number),
                ArgSpec::required("y", ArgKind::Number),
                ArgSpec::required("radius", ArgKind::Number),
                r_arg(),
            ],
        ),
        tool(
            FETCH_RAW,
            T,
            R,
            "the full stored observation of one record",
            vec![ArgSpec::required("record_index", ArgKind::Integer)],
        ),
    ]
}

pub fn spatial_tools() -> Vec<ToolSchema> {
    use OutputKind::SkillResult as S;
    vec![
        tool(
            NAVIGATE,
            ActionCategory::Navigation,
            S,
            "move to a landmark",
            vec![ArgSpec::required("landmark", ArgKind::LandmarkId)],
        ),
        tool(
            DETECT,
            ActionCategory::Perception,
            OutputKind::Perception,
            "list entities visible from the current pose",
            vec![],
        ),
        tool(
            OPEN,
            ActionCategory::Manipulation,
            S,
            "open the receptacle the robot stands at",
            vec![ArgSpec::required("receptacle", ArgKind::ReceptacleId)],
        ),
        tool(
            PICK,
            ActionCategory::Manipulation,
            S,
            "grasp a detected entity",
            vec![ArgSpec::required("entity", ArgKind::EntityId)],
        ),
    ]
}

/// Full registry when `with_memory`, spatial skills only otherwise.
pub fn standard_registry(with_memory: bool) -> ToolRegistry {
    let mut tools = if with_memory { temporal_tools() } else { Vec::new() };
    tools.extend(spatial_tools());
    ToolRegistry::new(tools).expect("standard tools are well formed")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkInfo {
    pub id: String,
    pub label: String,
    pub room_id: String,
    pub receptacle: bool,
    pub approach: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryInfo {
    pub records: usize,
    pub days: u64,
    pub ticks_per_day: u64,
    /// Day on which the task arrives (the day after the patrol).
    pub current_day: u64,
}

/// Everything a policy knows about its environment besides the trace: the
/// tools, the static map of landmarks, and the extent of memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistrySchema {
    pub tools: Vec<ToolSchema>,
    pub landmarks: Vec<LandmarkInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<MemoryInfo>,
}

impl RegistrySchema {
    pub fn new(registry: &ToolRegistry, world: &WorldState, memory: Option<&LongTermMemory>, task_time: u64) -> Self {
        let landmarks = world
            .landmarks
            .iter()
            .map(|l| LandmarkInfo {
                id: l.id.clone(),
                label: l.label(),
                room_id: l.room_id.clone(),
                receptacle: l.receptacle,
                approach: l.approach,
            })
            .collect();
        let memory = memory.map(|m| {
            let tpd = m.meta().ticks_per_day;
            MemoryInfo {
                records: m.len(),
                days: m.last_day().map_or(0, |d| d + 1),
                ticks_per_day: tpd,
                current_day: task_time / tpd,
            }
        });
        Self {
            tools: registry.tools().to_vec(),
            landmarks,
            memory,
        }
    }

    pub fn has_tool(&self, name: &str) -> bool {
        self.tools.iter().any(|t| t.name == name)
    }

    pub fn landmark(&self, id: &str) -> Option<&LandmarkInfo> {
        self.landmarks.iter().find(|l| l.id == id)
    }

    /// Landmarks carrying `label`, optionally restricted to one room.
    pub fn landmarks_labeled<'a>(&'a self, label: &'a str, room: Option<&'a str>) -> impl Iterator<Item = &'a LandmarkInfo> {
        self.landmarks
            .iter()
            .filter(move |l| l.label == label && room.map_or(true, |r| l.room_id == r))
    }

    /// Landmark whose approach point is nearest to `p` within `room`.
    pub fn nearest_landmark(&self, p: [f64; 2], room: &str) -> Option<&LandmarkInfo> {
        self.landmarks
            .iter()
            .filter(|l| l.room_id == room)
            .min_by(|a, b| recall_core::euclidean(a.approach, p).total_cmp(&recall_core::euclidean(b.approach, p)))
    }
}
