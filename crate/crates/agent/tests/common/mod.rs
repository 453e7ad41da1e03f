#![allow(dead_code)]

use recall_agent::{run_episode, standard_registry, EpisodeResult, MemoryAccess, Policy, RegistrySchema};
use recall_agent::Environment;
use recall_core::{Instruction, MemoryMode, NoiseModel, ToolRegistry};
use recall_embed::ReferenceEmbedder;
use recall_homesim::{generate_world, patrol, PatrolPlan, Schedule, SceneGraph, Simulation, WorldState};
use recall_memstore::{LongTermMemory, MemoryMeta};

pub const TPD: u64 = 200;
pub const DAYS: u64 = 4;

pub struct Setup {
    pub sim: Simulation,
    pub memory: LongTermMemory,
    pub embedder: ReferenceEmbedder,
    pub registry: ToolRegistry,
    pub schema: RegistrySchema,
    pub graphs: Vec<SceneGraph>,
}

pub fn setup_from(world: &WorldState, schedule: &Schedule) -> Setup {
    let plan = PatrolPlan::new(DAYS, TPD).unwrap();
    let run = patrol(world, schedule, plan).unwrap();
    let embedder = ReferenceEmbedder::new(256).unwrap();
    let meta = MemoryMeta::new(&embedder, TPD, MemoryMode::Oracle);
    let memory = LongTermMemory::build(run.frames.iter(), &embedder, meta, NoiseModel::default()).unwrap();
    let registry = standard_registry(true);
    let schema = RegistrySchema::new(&registry, run.sim.world(), Some(&memory), plan.task_time());
    let graphs = recall_homesim::export_scene_graphs(world, schedule, DAYS, TPD).unwrap();
    Setup {
        sim: run.sim,
        memory,
        embedder,
        registry,
        schema,
        graphs,
    }
}

pub fn setup(seed: u64) -> Setup {
    let (world, schedule) = generate_world(seed, 1).unwrap();
    setup_from(&world, &schedule)
}

pub fn run(s: &mut Setup, text: &str, target: &str, policy: &mut dyn Policy, budget: u32) -> EpisodeResult {
    let mut env = Environment {
        registry: &s.registry,
        memory: Some(MemoryAccess {
            memory: &s.memory,
            embedder: &s.embedder,
        }),
        sim: &mut s.sim,
    };
    run_episode(&Instruction::new(text), target, &mut env, &s.schema, policy, budget)
}
