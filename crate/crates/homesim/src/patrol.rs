use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recall_core::{derive_seed, normalize_yaw, Frame, Pose, SymbolicObservation, Timestep};

use crate::schedule::Schedule;
use crate::sim::Simulation;
use crate::world::WorldState;
use crate::SimError;

pub const MIN_PATROL_DAYS: u64 = 3;
pub const MAX_PATROL_DAYS: u64 = 6;
/// Ticks spent at each landmark before moving on.
pub const DEFAULT_DWELL: u64 = 5;
const POSE_JITTER: f64 = 0.05;

/// Route parameters for the daily patrol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatrolPlan {
    pub days: u64,
    pub ticks_per_day: u64,
    pub dwell: u64,
}

impl PatrolPlan {
    pub fn new(days: u64, ticks_per_day: u64) -> Result<Self, SimError> {
        if !(MIN_PATROL_DAYS..=MAX_PATROL_DAYS).contains(&days) {
            return Err(SimError::InvalidArgument(format!(
                "patrol length {days} days is outside {MIN_PATROL_DAYS}..={MAX_PATROL_DAYS}"
            )));
        }
        if ticks_per_day == 0 {
            return Err(SimError::InvalidArgument("ticks_per_day must be positive".into()));
        }
        Ok(Self {
            days,
            ticks_per_day,
            dwell: DEFAULT_DWELL,
        })
    }

    /// Tick at which the task arrives: the first tick after the patrol.
    pub fn task_time(&self) -> u64 {
        self.days * self.ticks_per_day
    }

    /// Dwell actually used for `n` landmarks: shortened when a full loop
    /// would not fit in one day.
    pub fn effective_dwell(&self, n: usize) -> u64 {
        self.dwell.min(self.ticks_per_day / n as u64).max(1)
    }

    /// Landmark index in route order visited at `tick_of_day`.
    pub fn stop_at(&self, tick_of_day: u64, n: usize) -> usize {
        ((tick_of_day / self.effective_dwell(n)) % n as u64) as usize
    }
}

/// Output of a patrol: the observation stream and the world as it stands
/// at task time (post-patrol events applied, robot docked).
pub struct PatrolRun {
    pub frames: Vec<Frame>,
    pub sim: Simulation,
}

/// Walks the landmark route every day, starting from the first landmark at
/// tick 0 of each day, and records one frame per tick.
pub fn patrol(world: &WorldState, schedule: &Schedule, plan: PatrolPlan) -> Result<PatrolRun, SimError> {
    let n = world.landmarks.len();
    if n == 0 {
        return Err(SimError::Config("world has no landmarks".into()));
    }
    if (plan.ticks_per_day as usize) < n {
        return Err(SimError::InvalidArgument(format!(
            "{} ticks per day cannot cover {n} landmarks",
            plan.ticks_per_day
        )));
    }
    let mut start = world.clone();
    start.clock = 0;
    let mut sim = Simulation::new(start, schedule, plan.ticks_per_day)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(schedule.seed, world.layout_seed));
    let total = plan.days * plan.ticks_per_day;
    let mut frames = Vec::with_capacity(total as usize);
    for t in 0..total {
        sim.advance_to(t);
        let lm = &sim.world().landmarks[plan.stop_at(t % plan.ticks_per_day, n)];
        let room = sim.world().room(&lm.room_id).expect("validated world");
        let jitter = [rng.gen_range(-POSE_JITTER..=POSE_JITTER), rng.gen_range(-POSE_JITTER..=POSE_JITTER)];
        let position = room.clamp([lm.approach[0] + jitter[0], lm.approach[1] + jitter[1]]);
        let yaw = normalize_yaw(lm.yaw + rng.gen_range(-0.1..=0.1));
        let pose = Pose::new(position[0], position[1], yaw, lm.room_id.clone());
        let focus = lm.id.clone();
        sim.place_robot(pose.clone(), Some(focus));
        let observation = SymbolicObservation::oracle(sim.visible_now()).expect("visible ids are unique");
        frames.push(Frame {
            t: Timestep::new(t, plan.ticks_per_day),
            pose,
            observation,
        });
    }
    sim.advance_to(plan.task_time());
    sim.dock_robot();
    Ok(PatrolRun { frames, sim })
}
