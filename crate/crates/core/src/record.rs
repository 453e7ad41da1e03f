use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::observation::SymbolicObservation;
use crate::pose::Pose;
use crate::time::Timestep;

/// Tolerance on the embedding's unit norm.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-6;

/// One long-term memory entry: when, where, the caption embedding, and the
/// raw observation it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryRecord {
    pub t: Timestep,
    pub pose: Pose,
    pub embedding: Vec<f32>,
    pub raw: SymbolicObservation,
}

impl MemoryRecord {
    pub fn validate(&self, dim: usize, ticks_per_day: u64) -> Result<(), CoreError> {
        self.t.validate(ticks_per_day)?;
        if self.embedding.len() != dim {
            return Err(CoreError::Invalid(format!(
                "embedding has dimension {} (expected {dim})",
                self.embedding.len()
            )));
        }
        let norm = l2_norm(&self.embedding);
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(CoreError::Invalid(format!("embedding norm {norm} is not 1")));
        }
        self.raw.validate()
    }

    /// The policy-facing summary of this record.
    pub fn view(&self, index: usize, score: f64) -> RecordView {
        RecordView {
            index,
            t: self.t,
            pose: self.pose.clone(),
            caption: self.raw.caption.clone(),
            score,
        }
    }
}

pub fn l2_norm(v: &[f32]) -> f64 {
    v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt()
}

/// A retrieved record as it appears in working memory. The embedding and
/// the raw observation are left out; `fetch_raw` recovers the latter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordView {
    pub index: usize,
    pub t: Timestep,
    pub pose: Pose,
    pub caption: String,
    pub score: f64,
}
