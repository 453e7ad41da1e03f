//! Domain types shared by the memory store, simulator, agent loop and
//! benchmark harness.

pub mod action;
pub mod caption;
mod error;
pub mod frame;
pub mod instruction;
pub mod observation;
pub mod outcome;
pub mod pose;
pub mod record;
pub mod seed;
pub mod time;
pub mod working;

pub use action::{
    validate_action, Action, ActionCategory, ArgKind, ArgSpec, ArgValue, FieldError, OutputKind, SchemaError,
    ToolDomain, ToolRegistry, ToolSchema,
};
pub use caption::{landmark_label, parse_caption, render_caption, CaptionSegment, MemoryMode, NoiseModel, NOTHING_NOTABLE};
pub use error::CoreError;
pub use frame::Frame;
pub use instruction::{Instruction, TaskFamily, TaskType};
pub use observation::{Containment, Detection, EntityView, SymbolicObservation};
pub use outcome::{Outcome, OutcomeKind};
pub use pose::{euclidean, normalize_yaw, Pose};
pub use record::{l2_norm, MemoryRecord, RecordView, UNIT_NORM_TOLERANCE};
pub use seed::derive_seed;
pub use time::{Timestep, DEFAULT_TICKS_PER_DAY};
pub use working::{Step, WorkingMemory};
