//! Budgeted agent loop over a unified action space: memory queries (search
//! in time) and physical skills (search in space) share one step budget.

pub mod conformance;
pub mod env;
pub mod episode;
pub mod parse;
pub mod policy;
pub mod tools;

pub use env::{Environment, MemoryAccess};
pub use episode::{run_episode, tally, ActionCounts, EpisodeResult, Termination, DEFAULT_BUDGET};
pub use parse::{days_phrase, parse_instruction, TargetQuery, TimeRef, PREFIXES};
pub use policy::{
    ChatAdapter, ExternalPolicy, PlainAdapter, Policy, PolicyContext, PolicyDecision, PolicyRequest, PolicyResponse,
    PriorTable, RandomPolicy, SceneGraphPolicy, StarConfig, StarPolicy, TemporalRetrievalPolicy, TraceEntry,
    WireAdapter, WireEnvironment, WIRE_VERSION,
};
pub use tools::{standard_registry, LandmarkInfo, MemoryInfo, RegistrySchema};
