use std::collections::BTreeSet;

use recall_core::{landmark_label, Containment, EntityView, Pose};
use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub id: String,
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Room {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (self.min[0]..=self.max[0]).contains(&p[0]) && (self.min[1]..=self.max[1]).contains(&p[1])
    }

    pub fn clamp(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0].clamp(self.min[0], self.max[0]), p[1].clamp(self.min[1], self.max[1])]
    }
}

/// A named surface or fixture. Receptacles can be opened and hold hidden
/// contents; other landmarks only hold objects in the open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub id: String,
    pub room_id: String,
    /// Where the robot stands when focused on this landmark.
    pub approach: [f64; 2],
    pub yaw: f64,
    #[serde(default)]
    pub receptacle: bool,
    #[serde(default)]
    pub open: bool,
}

impl Landmark {
    pub fn label(&self) -> String {
        landmark_label(&self.id)
    }

    pub fn approach_pose(&self) -> Pose {
        Pose::new(self.approach[0], self.approach[1], self.yaw, self.room_id.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    At(String),
    Inside(String),
    Held,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Object {
    pub id: String,
    pub class_label: String,
    pub attributes: Vec<String>,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Robot {
    pub pose: Pose,
    /// Landmark the robot is standing at, if any.
    pub focus: Option<String>,
    pub inventory: Vec<String>,
    /// Entity ids returned by the latest detect at the current focus.
    #[serde(default)]
    pub perceived: BTreeSet<String>,
    /// Whether a detect ran since the robot last moved.
    #[serde(default)]
    pub scanned: bool,
}

impl Robot {
    pub fn docked(pose: Pose) -> Self {
        Self {
            pose,
            focus: None,
            inventory: Vec::new(),
            perceived: BTreeSet::new(),
            scanned: false,
        }
    }
}

/// Ground-truth environment state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub scene_id: u8,
    pub layout_seed: u64,
    pub rooms: Vec<Room>,
    pub landmarks: Vec<Landmark>,
    pub objects: Vec<Object>,
    /// Robot pose at the start of patrols and episodes.
    pub dock: Pose,
    pub robot: Robot,
    pub clock: u64,
}

impl WorldState {
    pub fn room(&self, id: &str) -> Option<&Room> {
        self.rooms.iter().find(|r| r.id == id)
    }

    pub fn landmark(&self, id: &str) -> Option<&Landmark> {
        self.landmarks.iter().find(|l| l.id == id)
    }

    pub(crate) fn landmark_mut(&mut self, id: &str) -> Option<&mut Landmark> {
        self.landmarks.iter_mut().find(|l| l.id == id)
    }

    pub fn object(&self, id: &str) -> Option<&Object> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub(crate) fn object_mut(&mut self, id: &str) -> Option<&mut Object> {
        self.objects.iter_mut().find(|o| o.id == id)
    }

    pub fn receptacles(&self) -> impl Iterator<Item = &Landmark> {
        self.landmarks.iter().filter(|l| l.receptacle)
    }

    /// Landmark that physically holds the object (its surface or container).
    pub fn object_landmark(&self, id: &str) -> Option<&str> {
        match &self.object(id)?.location {
            Location::At(l) | Location::Inside(l) => Some(l.as_str()),
            Location::Held => None,
        }
    }

    pub fn object_room(&self, id: &str) -> Option<&str> {
        let lm = self.object_landmark(id)?;
        self.landmark(lm).map(|l| l.room_id.as_str())
    }

    /// Entities visible with the robot in `room` focused on `focus`: every
    /// open-air object in the room plus the contents of the focused
    /// landmark when it is an open receptacle. Sorted by entity id.
    pub fn visible_from(&self, room: &str, focus: Option<&str>) -> Vec<EntityView> {
        let focused_open = focus
            .and_then(|f| self.landmark(f))
            .filter(|l| l.receptacle && l.open)
            .map(|l| l.id.as_str());
        let mut out: Vec<EntityView> = self
            .objects
            .iter()
            .filter_map(|o| {
                let (lm, containment) = match &o.location {
                    Location::At(l) => (l, Containment::OpenAir),
                    Location::Inside(l) if Some(l.as_str()) == focused_open => (l, Containment::InsideOpenReceptacle),
                    _ => return None,
                };
                let landmark = self.landmark(lm)?;
                (landmark.room_id == room).then(|| EntityView {
                    entity_id: o.id.clone(),
                    class_label: o.class_label.clone(),
                    attributes: o.attributes.clone(),
                    landmark_id: lm.clone(),
                    containment,
                })
            })
            .collect();
        out.sort_by(|a, b| a.entity_id.cmp(&b.entity_id));
        out
    }

    /// Checks ids are unique and every reference resolves.
    pub fn validate(&self) -> Result<(), SimError> {
        let mut ids = BTreeSet::new();
        for id in self
            .rooms
            .iter()
            .map(|r| &r.id)
            .chain(self.landmarks.iter().map(|l| &l.id))
            .chain(self.objects.iter().map(|o| &o.id))
        {
            if !ids.insert(id.as_str()) {
                return Err(SimError::Config(format!("duplicate id {id}")));
            }
        }
        for l in &self.landmarks {
            let room = self
                .room(&l.room_id)
                .ok_or_else(|| SimError::Config(format!("landmark {} names unknown room {}", l.id, l.room_id)))?;
            if !room.contains(l.approach) {
                return Err(SimError::Config(format!("landmark {} approach lies outside {}", l.id, room.id)));
            }
        }
        for o in &self.objects {
            check_location(self, &o.id, &o.location)?;
        }
        if self.room(&self.dock.room_id).is_none() {
            return Err(SimError::Config(format!("dock room {} does not exist", self.dock.room_id)));
        }
        Ok(())
    }
}

pub(crate) fn check_location(world: &WorldState, object: &str, loc: &Location) -> Result<(), SimError> {
    match loc {
        Location::At(l) => {
            let lm = world
                .landmark(l)
                .ok_or_else(|| SimError::Config(format!("{object} placed at unknown landmark {l}")))?;
            if lm.receptacle {
                return Err(SimError::Config(format!(
                    "{object} placed on receptacle {l}; receptacles only hold contents"
                )));
            }
        }
        Location::Inside(l) => {
            let lm = world
                .landmark(l)
                .ok_or_else(|| SimError::Config(format!("{object} placed inside unknown landmark {l}")))?;
            if !lm.receptacle {
                return Err(SimError::Config(format!("{object} placed inside {l}, which is not a receptacle")));
            }
        }
        Location::Held => {}
    }
    Ok(())
}
