use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::caption::{render_caption, MemoryMode, NoiseModel};
use crate::error::CoreError;
use crate::pose::Pose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    OpenAir,
    InsideOpenReceptacle,
}

/// One entity as seen in an observation or a detection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityView {
    pub entity_id: String,
    pub class_label: String,
    pub attributes: Vec<String>,
    pub landmark_id: String,
    pub containment: Containment,
}

impl EntityView {
    pub fn matches(&self, class_label: &str, attributes: &[String]) -> bool {
        self.class_label == class_label && attributes.iter().all(|a| self.attributes.contains(a))
    }
}

/// Symbolic stand-in for a camera frame: the entities in view plus the
/// caption rendered from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicObservation {
    pub visible_entities: Vec<EntityView>,
    pub caption: String,
    #[serde(default)]
    pub keyframe: bool,
}

impl SymbolicObservation {
    pub fn new(
        visible_entities: Vec<EntityView>,
        mode: MemoryMode,
        seed: u64,
        noise: &NoiseModel,
    ) -> Result<Self, CoreError> {
        check_unique_ids(&visible_entities)?;
        let caption = render_caption(&visible_entities, mode, seed, noise);
        Ok(Self {
            visible_entities,
            caption,
            keyframe: false,
        })
    }

    pub fn oracle(visible_entities: Vec<EntityView>) -> Result<Self, CoreError> {
        Self::new(visible_entities, MemoryMode::Oracle, 0, &NoiseModel::default())
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        check_unique_ids(&self.visible_entities)
    }
}

fn check_unique_ids(entities: &[EntityView]) -> Result<(), CoreError> {
    let mut seen = BTreeSet::new();
    for e in entities {
        if !seen.insert(e.entity_id.as_str()) {
            return Err(CoreError::Invalid(format!(
                "entity {} appears twice in one observation",
                e.entity_id
            )));
        }
    }
    Ok(())
}

/// Output of the detection skill.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub entities: Vec<EntityView>,
    pub from_pose: Pose,
}
