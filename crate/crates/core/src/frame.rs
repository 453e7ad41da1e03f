use serde::{Deserialize, Serialize};

use crate::observation::SymbolicObservation;
use crate::pose::Pose;
use crate::time::Timestep;

/// One element of a patrol stream: what the robot saw, where, and when.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: Timestep,
    pub pose: Pose,
    pub observation: SymbolicObservation,
}
