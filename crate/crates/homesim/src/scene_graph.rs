use recall_core::derive_seed;
use serde::{Deserialize, Serialize};

use crate::schedule::Schedule;
use crate::sim::Simulation;
use crate::world::{Location, WorldState};
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Room,
    Landmark,
    Receptacle,
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneNode {
    /// Opaque id, stable across days of one world.
    pub id: String,
    pub kind: NodeKind,
    /// Class label for objects, human label for rooms and landmarks.
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// landmark in room
    In,
    /// object on landmark
    At,
    /// object inside receptacle
    Inside,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneEdge {
    pub from: String,
    pub relation: Relation,
    pub to: String,
}

/// End-of-day ground-truth snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub day: u64,
    pub nodes: Vec<SceneNode>,
    pub edges: Vec<SceneEdge>,
}

impl SceneGraph {
    pub fn node(&self, id: &str) -> Option<&SceneNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Target of the object's `at`/`inside` edge.
    pub fn placement(&self, object_node: &str) -> Option<&SceneEdge> {
        self.edges
            .iter()
            .find(|e| e.from == object_node && matches!(e.relation, Relation::At | Relation::Inside))
    }

    /// Room node holding a landmark node.
    pub fn room_of(&self, landmark_node: &str) -> Option<&SceneNode> {
        self.edges
            .iter()
            .find(|e| e.from == landmark_node && e.relation == Relation::In)
            .and_then(|e| self.node(&e.to))
    }
}

/// Node id for a world entity: a hash of the world seed and the entity
/// id, so ids say nothing about which physical instance they denote.
pub fn node_id(world: &WorldState, entity_id: &str) -> String {
    let mut h = derive_seed(world.layout_seed, u64::from(world.scene_id));
    for b in entity_id.bytes() {
        h = derive_seed(h, u64::from(b));
    }
    format!("n{:012x}", h & 0xffff_ffff_ffff)
}

pub fn snapshot(world: &WorldState, day: u64) -> SceneGraph {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for r in &world.rooms {
        nodes.push(SceneNode {
            id: node_id(world, &r.id),
            kind: NodeKind::Room,
            label: r.id.replace('_', " "),
            attributes: vec![],
        });
    }
    for l in &world.landmarks {
        nodes.push(SceneNode {
            id: node_id(world, &l.id),
            kind: if l.receptacle { NodeKind::Receptacle } else { NodeKind::Landmark },
            label: l.label(),
            attributes: vec![],
        });
        edges.push(SceneEdge {
            from: node_id(world, &l.id),
            relation: Relation::In,
            to: node_id(world, &l.room_id),
        });
    }
    for o in &world.objects {
        nodes.push(SceneNode {
            id: node_id(world, &o.id),
            kind: NodeKind::Object,
            label: o.class_label.clone(),
            attributes: o.attributes.clone(),
        });
        let (relation, to) = match &o.location {
            Location::At(l) => (Relation::At, l),
            Location::Inside(l) => (Relation::Inside, l),
            Location::Held => continue,
        };
        edges.push(SceneEdge {
            from: node_id(world, &o.id),
            relation,
            to: node_id(world, to),
        });
    }
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    edges.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
    SceneGraph { day, nodes, edges }
}

/// Snapshots at the end of each of the first `days` days.
pub fn export_scene_graphs(
    world: &WorldState,
    schedule: &Schedule,
    days: u64,
    ticks_per_day: u64,
) -> Result<Vec<SceneGraph>, SimError> {
    let mut start = world.clone();
    start.clock = 0;
    let mut sim = Simulation::new(start, schedule, ticks_per_day)?;
    let mut out = Vec::with_capacity(days as usize);
    for day in 0..days {
        sim.advance_to((day + 1) * ticks_per_day - 1);
        out.push(snapshot(sim.world(), day));
    }
    Ok(out)
}

/// End-of-day snapshot for one day of a `days`-long patrol.
pub fn export_scene_graph(
    world: &WorldState,
    schedule: &Schedule,
    day: u64,
    days: u64,
    ticks_per_day: u64,
) -> Result<SceneGraph, SimError> {
    if day >= days {
        return Err(SimError::InvalidArgument(format!("day {day} is outside the {days}-day patrol")));
    }
    Ok(export_scene_graphs(world, schedule, day + 1, ticks_per_day)?.pop().expect("day + 1 snapshots"))
}
