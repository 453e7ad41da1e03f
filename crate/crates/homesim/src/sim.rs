use recall_core::{Detection, Outcome, Pose, Timestep};

use crate::schedule::{EventOp, Schedule};
use crate::world::{check_location, Location, Robot, WorldState};
use crate::SimError;

/// A world advancing under a schedule. Every patrol tick and every robot
/// skill advances the clock by exactly one; events fire when their tick
/// is reached.
#[derive(Debug, Clone)]
pub struct Simulation {
    world: WorldState,
    ticks_per_day: u64,
    timeline: Vec<(u64, EventOp)>,
    cursor: usize,
}

impl Simulation {
    /// Starts at the world's clock, firing any events due at that tick.
    /// Events scheduled earlier than the clock are skipped.
    pub fn new(world: WorldState, schedule: &Schedule, ticks_per_day: u64) -> Result<Self, SimError> {
        if ticks_per_day == 0 {
            return Err(SimError::InvalidArgument("ticks_per_day must be positive".into()));
        }
        world.validate()?;
        for e in &schedule.events {
            if e.tick_of_day >= ticks_per_day {
                return Err(SimError::Config(format!(
                    "event at tick {} of day {} exceeds {ticks_per_day} ticks/day",
                    e.tick_of_day, e.day
                )));
            }
            match &e.op {
                EventOp::Move { object, to } => {
                    if world.object(object).is_none() {
                        return Err(SimError::Config(format!("schedule moves unknown object {object}")));
                    }
                    check_location(&world, object, to)?;
                }
                EventOp::Open { receptacle } | EventOp::Close { receptacle } => {
                    if !world.landmark(receptacle).is_some_and(|l| l.receptacle) {
                        return Err(SimError::Config(format!("schedule toggles non-receptacle {receptacle}")));
                    }
                }
            }
        }
        let timeline = schedule.timeline(ticks_per_day);
        let cursor = timeline.partition_point(|(t, _)| *t < world.clock);
        let mut sim = Self {
            world,
            ticks_per_day,
            timeline,
            cursor,
        };
        sim.fire_due();
        Ok(sim)
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn into_world(self) -> WorldState {
        self.world
    }

    pub fn ticks_per_day(&self) -> u64 {
        self.ticks_per_day
    }

    pub fn clock(&self) -> u64 {
        self.world.clock
    }

    pub fn now(&self) -> Timestep {
        Timestep::new(self.world.clock, self.ticks_per_day)
    }

    fn fire_due(&mut self) {
        while let Some((t, op)) = self.timeline.get(self.cursor) {
            if *t > self.world.clock {
                break;
            }
            let op = op.clone();
            self.cursor += 1;
            self.apply(&op);
        }
    }

    fn apply(&mut self, op: &EventOp) {
        match op {
            EventOp::Move { object, to } => {
                if let Some(o) = self.world.object_mut(object) {
                    // The robot's grip wins over the schedule.
                    if o.location != Location::Held {
                        o.location = to.clone();
                    }
                }
            }
            EventOp::Open { receptacle } => self.set_open(receptacle, true),
            EventOp::Close { receptacle } => self.set_open(receptacle, false),
        }
    }

    fn set_open(&mut self, receptacle: &str, open: bool) {
        if let Some(l) = self.world.landmark_mut(receptacle) {
            l.open = open;
        }
    }

    /// Advances the clock by one tick.
    pub fn tick(&mut self) {
        self.world.clock += 1;
        self.fire_due();
    }

    /// Advances to tick `t` (no-op when already there or past it).
    pub fn advance_to(&mut self, t: u64) {
        while self.world.clock < t {
            self.tick();
        }
    }

    pub(crate) fn place_robot(&mut self, pose: Pose, focus: Option<String>) {
        self.world.robot.pose = pose;
        self.world.robot.focus = focus;
        self.world.robot.perceived.clear();
        self.world.robot.scanned = false;
    }

    /// Returns the robot to the dock with empty hands.
    pub fn dock_robot(&mut self) {
        let dock = self.world.dock.clone();
        self.world.robot = Robot::docked(dock);
    }

    pub fn visible_now(&self) -> Vec<recall_core::EntityView> {
        let r = &self.world.robot;
        self.world.visible_from(&r.pose.room_id, r.focus.as_deref())
    }

    pub fn navigate(&mut self, landmark: &str) -> Outcome {
        let outcome = match self.world.landmark(landmark) {
            Some(l) => {
                let pose = l.approach_pose();
                self.place_robot(pose, Some(landmark.to_string()));
                Outcome::success()
            }
            None => Outcome::failure("unknown landmark"),
        };
        self.tick();
        outcome
    }

    pub fn detect(&mut self) -> Detection {
        let entities = self.visible_now();
        let robot = &mut self.world.robot;
        robot.perceived = entities.iter().map(|e| e.entity_id.clone()).collect();
        robot.scanned = true;
        let detection = Detection {
            entities,
            from_pose: robot.pose.clone(),
        };
        self.tick();
        detection
    }

    pub fn open(&mut self, receptacle: &str) -> Outcome {
        let outcome = self.try_open(receptacle);
        self.tick();
        outcome
    }

    fn try_open(&mut self, receptacle: &str) -> Outcome {
        let Some(l) = self.world.landmark(receptacle) else {
            return Outcome::failure("unknown landmark");
        };
        if !l.receptacle {
            return Outcome::failure("not a receptacle");
        }
        if self.world.robot.focus.as_deref() != Some(receptacle) {
            return Outcome::failure("out of reach");
        }
        if !self.world.robot.scanned {
            return Outcome::failure("receptacle not perceived");
        }
        if !l.open {
            self.set_open(receptacle, true);
            // Newly exposed contents must be detected before picking.
            self.world.robot.scanned = false;
        }
        Outcome::success()
    }

    pub fn pick(&mut self, entity: &str) -> Outcome {
        let outcome = self.try_pick(entity);
        self.tick();
        outcome
    }

    fn try_pick(&mut self, entity: &str) -> Outcome {
        let Some(o) = self.world.object(entity) else {
            return Outcome::failure("unknown entity");
        };
        if o.location == Location::Held {
            return Outcome::failure("already held");
        }
        if !self.visible_now().iter().any(|e| e.entity_id == entity) {
            return Outcome::failure("not visible");
        }
        if !self.world.robot.perceived.contains(entity) {
            return Outcome::failure("not detected");
        }
        if let Some(o) = self.world.object_mut(entity) {
            o.location = Location::Held;
        }
        self.world.robot.inventory.push(entity.to_string());
        self.world.robot.perceived.remove(entity);
        Outcome::success()
    }
}
