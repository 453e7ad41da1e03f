//! Dynamic household simulator.
//!
//! A [`WorldState`] holds rooms, landmarks (some of them openable
//! receptacles) and objects. A [`Schedule`] moves objects and opens or
//! closes receptacles at fixed ticks. [`patrol`] replays the schedule while
//! the robot tours every landmark, yielding the observation stream used to
//! build long-term memory; [`Simulation`] then exposes the robot skills
//! (navigate, detect, open, pick) against the world at task time.
//!
//! Visibility: with the robot in a room, every open-air object in that room
//! is visible, plus the contents of the landmark the robot is focused on if
//! it is an open receptacle. Closed receptacles hide their contents.

mod layout;
mod patrol;
mod scene_graph;
mod schedule;
mod sim;
mod world;

pub use layout::{generate_world, household_classes, BACKGROUND_DAYS, PAIRED_CLASSES, SCENE_IDS, SINGLE_CLASSES};
pub use patrol::{patrol, PatrolPlan, PatrolRun, DEFAULT_DWELL, MAX_PATROL_DAYS, MIN_PATROL_DAYS};
pub use scene_graph::{
    export_scene_graph, export_scene_graphs, node_id, snapshot, NodeKind, Relation, SceneEdge, SceneGraph, SceneNode,
};
pub use schedule::{EventOp, Schedule, ScheduledEvent};
pub use sim::Simulation;
pub use world::{Landmark, Location, Object, Robot, Room, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid world config: {0}")]
    Config(String),
}
