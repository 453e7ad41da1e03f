//! Task suite generation. Each task is a generated scene plus a schedule
//! engineered so the family's defining hazard holds.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recall_agent::{days_phrase, PREFIXES};
use recall_core::{derive_seed, Instruction, TaskFamily, TaskType, DEFAULT_TICKS_PER_DAY};
use recall_homesim::{
    generate_world, household_classes, EventOp, Location, PatrolPlan, Schedule, ScheduledEvent, WorldState,
    MAX_PATROL_DAYS, MIN_PATROL_DAYS, PAIRED_CLASSES, SCENE_IDS, SINGLE_CLASSES,
};
use serde::{Deserialize, Serialize};

use crate::optimal::optimal_counts;
use crate::task::{Hazard, OptimalCounts, TaskSpec, TwinReceptacle};
use crate::BenchError;

pub const PAPER_TICKS_PER_DAY: u64 = 1300;
pub const DEFAULT_PER_FAMILY: usize = 3;
pub const PAPER_PER_FAMILY: usize = 15;
const ATTEMPTS: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub scenes: Vec<u8>,
    pub per_family: usize,
    pub seed: u64,
    pub ticks_per_day: u64,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            scenes: SCENE_IDS.to_vec(),
            per_family: DEFAULT_PER_FAMILY,
            seed: 1,
            ticks_per_day: DEFAULT_TICKS_PER_DAY,
        }
    }
}

/// Interactive tasks per (scene, family): two per started block of five.
pub fn interactive_per_family(per_family: usize) -> usize {
    2 * per_family.div_ceil(5)
}

/// `(visible, interactive, commonsense)` task counts for a spec.
pub fn expected_counts(spec: &SuiteSpec) -> (usize, usize, usize) {
    let s = spec.scenes.len();
    let f = TaskFamily::MEMORY.len();
    (
        s * f * spec.per_family,
        s * f * interactive_per_family(spec.per_family),
        s * spec.per_family,
    )
}

fn type_slug(t: TaskType) -> &'static str {
    match t {
        TaskType::Visible => "visible",
        TaskType::Interactive => "interactive",
        TaskType::Commonsense => "commonsense",
    }
}

fn type_index(t: TaskType) -> u64 {
    match t {
        TaskType::Visible => 0,
        TaskType::Interactive => 1,
        TaskType::Commonsense => 2,
    }
}

fn family_index(f: TaskFamily) -> u64 {
    match f {
        TaskFamily::Class => 0,
        TaskFamily::Attribute => 1,
        TaskFamily::Spatial => 2,
        TaskFamily::SpatialTemporal => 3,
        TaskFamily::SpatialFrequentist => 4,
        TaskFamily::Commonsense => 5,
    }
}

pub fn task_id(scene: u8, t: TaskType, f: TaskFamily, k: usize) -> String {
    format!("s{scene}-{}-{}-{k:03}", type_slug(t), f.abbrev().to_lowercase())
}

/// Builds one task; retries with fresh layouts when a layout cannot host
/// the family's constraints.
/// Runs `build` on fresh layouts until one is feasible.
pub(crate) fn with_retries(
    id: &str,
    scene: u8,
    base: u64,
    ticks_per_day: u64,
    build: impl Fn(Draft) -> Result<TaskSpec, BenchError>,
) -> Result<TaskSpec, BenchError> {
    let mut last = None;
    for attempt in 0..ATTEMPTS {
        let draft = Draft::new(id, scene, derive_seed(base, attempt), ticks_per_day)?;
        match build(draft) {
            Ok(task) => return Ok(task),
            Err(e @ BenchError::Infeasible { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| BenchError::InvalidArgument(format!("no attempt made for {id}"))))
}

pub fn generate_task(
    seed: u64,
    scene: u8,
    task_type: TaskType,
    family: TaskFamily,
    k: usize,
    ticks_per_day: u64,
) -> Result<TaskSpec, BenchError> {
    let id = task_id(scene, task_type, family, k);
    let base = [u64::from(scene), type_index(task_type), family_index(family), k as u64]
        .iter()
        .fold(seed, |s, v| derive_seed(s, *v));
    with_retries(&id, scene, base, ticks_per_day, |draft| match (task_type, family) {
        (TaskType::Commonsense, _) | (_, TaskFamily::Commonsense) => draft.commonsense(k),
        (t, TaskFamily::Class) => draft.class(t == TaskType::Interactive),
        (t, TaskFamily::Attribute) => draft.attribute(t == TaskType::Interactive),
        (t, TaskFamily::Spatial) => draft.spatial(t == TaskType::Interactive),
        (t, TaskFamily::SpatialTemporal) => draft.spatial_temporal(t == TaskType::Interactive),
        (t, TaskFamily::SpatialFrequentist) => draft.spatial_frequentist(t == TaskType::Interactive),
    })
}

pub fn generate_suite(spec: &SuiteSpec) -> Result<Vec<TaskSpec>, BenchError> {
    if spec.per_family == 0 {
        return Err(BenchError::InvalidArgument("per_family must be at least 1".into()));
    }
    if spec.scenes.is_empty() {
        return Err(BenchError::InvalidArgument("no scenes selected".into()));
    }
    let mut out = Vec::new();
    for &scene in &spec.scenes {
        for family in TaskFamily::MEMORY {
            for k in 0..spec.per_family {
                out.push(generate_task(spec.seed, scene, TaskType::Visible, family, k, spec.ticks_per_day)?);
            }
        }
        for family in TaskFamily::MEMORY {
            for k in 0..interactive_per_family(spec.per_family) {
                out.push(generate_task(spec.seed, scene, TaskType::Interactive, family, k, spec.ticks_per_day)?);
            }
        }
        for k in 0..spec.per_family {
            out.push(generate_task(
                spec.seed,
                scene,
                TaskType::Commonsense,
                TaskFamily::Commonsense,
                k,
                spec.ticks_per_day,
            )?);
        }
    }
    Ok(out)
}

/// Scratch state while building one task.
pub(crate) struct Draft {
    pub id: String,
    pub scene: u8,
    pub layout_seed: u64,
    pub days: u64,
    pub tpd: u64,
    pub world: WorldState,
    pub background: Schedule,
    pub rng: ChaCha8Rng,
    pub events: Vec<ScheduledEvent>,
    /// Objects whose background moves are dropped.
    pub involved: Vec<String>,
    /// Also drop background moves of the target.
    pub pin_target: bool,
}

impl Draft {
    pub fn new(id: &str, scene: u8, layout_seed: u64, tpd: u64) -> Result<Self, BenchError> {
        let (world, background) = generate_world(layout_seed, scene)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(layout_seed, 0x7a5c_0001));
        let days = rng.gen_range(MIN_PATROL_DAYS..=MAX_PATROL_DAYS);
        Ok(Self {
            id: id.into(),
            scene,
            layout_seed,
            days,
            tpd,
            world,
            background,
            rng,
            events: Vec::new(),
            involved: Vec::new(),
            pin_target: false,
        })
    }

    pub fn infeasible(&self, constraint: impl Into<String>) -> BenchError {
        BenchError::Infeasible {
            task: self.id.clone(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn prefix(&mut self) -> &'static str {
        PREFIXES.choose(&mut self.rng).expect("prefixes non-empty").trim_end()
    }

    fn at(&mut self, day: u64, tick: u64, op: EventOp) {
        self.events.push(ScheduledEvent::new(day, tick, op));
    }

    fn at_abs(&mut self, t: u64, op: EventOp) {
        self.at(t / self.tpd, t % self.tpd, op);
    }

    pub(crate) fn move_to(&mut self, day: u64, tick: u64, object: &str, landmark: &str) {
        self.at(
            day,
            tick,
            EventOp::Move {
                object: object.into(),
                to: Location::At(landmark.into()),
            },
        );
    }

    pub(crate) fn involve(&mut self, ids: &[&str]) {
        self.involved.extend(ids.iter().map(|s| s.to_string()));
    }

    pub(crate) fn initial_landmark(&self, object: &str) -> Result<String, BenchError> {
        match self.world.object(object).map(|o| &o.location) {
            Some(Location::At(l)) => Ok(l.clone()),
            _ => Err(self.infeasible(format!("{object} does not start on a surface"))),
        }
    }

    fn surfaces(&self) -> Vec<String> {
        self.world
            .landmarks
            .iter()
            .filter(|l| !l.receptacle)
            .map(|l| l.id.clone())
            .collect()
    }

    pub(crate) fn room_of(&self, landmark: &str) -> String {
        self.world.landmark(landmark).map(|l| l.room_id.clone()).unwrap_or_default()
    }

    /// A random surface other than the excluded ones, optionally avoiding
    /// whole rooms.
    pub(crate) fn other_surface(&mut self, exclude: &[&str], avoid_rooms: &[String]) -> Result<String, BenchError> {
        let options: Vec<String> = self
            .surfaces()
            .into_iter()
            .filter(|s| !exclude.contains(&s.as_str()) && !avoid_rooms.contains(&self.room_of(s)))
            .collect();
        options
            .choose(&mut self.rng)
            .cloned()
            .ok_or_else(|| self.infeasible("no free surface satisfies the placement constraints"))
    }

    pub(crate) fn label(&self, landmark: &str) -> (String, &'static str) {
        let l = self.world.landmark(landmark).expect("landmark exists");
        (l.label(), if l.receptacle { "in" } else { "on" })
    }

    pub(crate) fn paired_class(&mut self) -> (String, String, String) {
        let class = *PAIRED_CLASSES.choose(&mut self.rng).expect("paired classes");
        let (a, b) = (format!("{class}_1"), format!("{class}_2"));
        let (target, other) = if self.rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        (class.to_string(), target, other)
    }

    fn twin_pair(&mut self) -> Result<TwinReceptacle, BenchError> {
        let mut pairs = Vec::new();
        for a in self.world.receptacles() {
            for b in self.world.receptacles() {
                if a.id < b.id && a.room_id == b.room_id && a.label() == b.label() {
                    pairs.push((a.id.clone(), b.id.clone()));
                }
            }
        }
        let (a, b) = pairs
            .choose(&mut self.rng)
            .cloned()
            .ok_or_else(|| self.infeasible("scene has no pair of identical receptacles"))?;
        Ok(if self.rng.gen_bool(0.5) {
            TwinReceptacle { receptacle: a, twin: b }
        } else {
            TwinReceptacle { receptacle: b, twin: a }
        })
    }

    /// Puts `object` into `receptacle` at `(day, tick)`, leaving it open
    /// long enough for one full patrol loop to look inside, then closes it.
    fn put_away(&mut self, object: &str, receptacle: &str, day: u64, tick: u64) -> Result<(), BenchError> {
        let plan = PatrolPlan::new(self.days, self.tpd)?;
        let n = self.world.landmarks.len();
        let dwell = plan.effective_dwell(n);
        let window = (n as u64 + 1) * dwell;
        let start = day * self.tpd + tick;
        if start + window >= plan.task_time() {
            return Err(self.infeasible(format!(
                "put-away of {object} at tick {start} cannot be observed before the task"
            )));
        }
        self.at_abs(
            start,
            EventOp::Open {
                receptacle: receptacle.into(),
            },
        );
        self.at_abs(
            start,
            EventOp::Move {
                object: object.into(),
                to: Location::Inside(receptacle.into()),
            },
        );
        self.at_abs(
            start + window,
            EventOp::Close {
                receptacle: receptacle.into(),
            },
        );
        Ok(())
    }

    pub fn finish(
        self,
        target: &str,
        text: String,
        family: TaskFamily,
        task_type: TaskType,
        hazard: Hazard,
        receptacle: Option<TwinReceptacle>,
    ) -> Result<TaskSpec, BenchError> {
        let mut involved: Vec<&str> = self.involved.iter().map(String::as_str).collect();
        if self.pin_target {
            involved.push(target);
        }
        let mut background = self.background.without_objects(&involved);
        background.events.retain(|e| e.day < self.days);
        let mut own = Schedule::new(self.background.seed);
        own.events = self.events;
        let mut task = TaskSpec {
            id: self.id,
            instruction: Instruction::labeled(text, family, task_type),
            target: target.into(),
            scene_id: self.scene,
            layout_seed: self.layout_seed,
            patrol_days: self.days,
            ticks_per_day: self.tpd,
            // Task events after the background so they win ties.
            schedule: background.merged(&own),
            hazard,
            receptacle,
            optimal: OptimalCounts::default(),
        };
        task.optimal = optimal_counts(&task)?;
        Ok(task)
    }

    pub fn class(mut self, interactive: bool) -> Result<TaskSpec, BenchError> {
        let class = *SINGLE_CLASSES.choose(&mut self.rng).expect("single classes");
        let target = format!("{class}_1");
        let mut receptacle = None;
        if interactive {
            self.involve(&[&target]);
            let pair = self.twin_pair()?;
            let day = self.rng.gen_range(0..self.days);
            self.put_away(&target, &pair.receptacle, day, self.tpd / 4)?;
            receptacle = Some(pair);
        }
        let text = format!("{} {class}", self.prefix());
        let t = if interactive { TaskType::Interactive } else { TaskType::Visible };
        self.finish(&target, text, TaskFamily::Class, t, Hazard::UniqueClass, receptacle)
    }

    pub fn attribute(mut self, interactive: bool) -> Result<TaskSpec, BenchError> {
        let (class, target, distractor) = self.paired_class();
        self.involve(&[&target, &distractor]);
        let home = self.initial_landmark(&target)?;
        if self.initial_landmark(&distractor)? != home {
            self.move_to(0, 0, &distractor, &home);
        }
        let mut receptacle = None;
        if interactive {
            let pair = self.twin_pair()?;
            let day = self.rng.gen_range(0..self.days);
            self.put_away(&target, &pair.receptacle, day, self.tpd / 4)?;
            receptacle = Some(pair);
        }
        let color = self.world.object(&target).expect("target exists").attributes.join(" ");
        let text = format!("{} {color} {class}", self.prefix());
        let t = if interactive { TaskType::Interactive } else { TaskType::Visible };
        self.finish(&target, text, TaskFamily::Attribute, t, Hazard::AttributeTwin { distractor }, receptacle)
    }

    pub fn spatial(mut self, interactive: bool) -> Result<TaskSpec, BenchError> {
        let (class, target, distractor) = self.paired_class();
        self.involve(&[&target, &distractor]);
        let home = self.initial_landmark(&target)?;
        if self.initial_landmark(&distractor)? == home {
            let elsewhere = self.other_surface(&[&home], &[])?;
            self.move_to(0, 0, &distractor, &elsewhere);
        }
        let (place, receptacle) = if interactive {
            let pair = self.twin_pair()?;
            let day = self.rng.gen_range(0..self.days);
            self.put_away(&target, &pair.receptacle, day, self.tpd / 4)?;
            (pair.receptacle.clone(), Some(pair))
        } else {
            (home, None)
        };
        let (label, prep) = self.label(&place);
        let text = format!("{} {class} {prep} the {label}", self.prefix());
        let t = if interactive { TaskType::Interactive } else { TaskType::Visible };
        let hazard = Hazard::SpatialPair {
            distractor,
            landmark: place,
        };
        self.finish(&target, text, TaskFamily::Spatial, t, hazard, receptacle)
    }

    pub fn spatial_temporal(mut self, interactive: bool) -> Result<TaskSpec, BenchError> {
        let n = self.rng.gen_range(1..=2u64);
        let ref_day = self.days - n;
        let (class, target, distractor) = self.paired_class();
        self.involve(&[&target, &distractor]);
        let home = self.initial_landmark(&target)?;
        if self.initial_landmark(&distractor)? == home {
            let elsewhere = self.other_surface(&[&home], &[])?;
            self.move_to(0, 0, &distractor, &elsewhere);
        }
        // Leaves halfway through the reference day when that is the last
        // patrol day (so the rest of the day still observes the new place),
        // otherwise early the day after.
        let (day, tick) = if n == 1 {
            (ref_day, self.tpd / 2)
        } else {
            (ref_day + 1, self.tpd / 4)
        };
        let mut receptacle = None;
        if interactive {
            let pair = self.twin_pair()?;
            self.put_away(&target, &pair.receptacle, day, tick)?;
            receptacle = Some(pair);
        } else {
            let dest = self.other_surface(&[&home], &[])?;
            self.move_to(day, tick, &target, &dest);
        }
        self.move_to(self.days, 0, &distractor, &home);
        let (label, prep) = self.label(&home);
        let text = format!("{} {class} that was {prep} the {label} {}", self.prefix(), days_phrase(n));
        let t = if interactive { TaskType::Interactive } else { TaskType::Visible };
        let hazard = Hazard::MovedSince {
            day: ref_day,
            landmark: home,
            distractor: Some(distractor),
        };
        self.finish(&target, text, TaskFamily::SpatialTemporal, t, hazard, receptacle)
    }

    pub fn spatial_frequentist(mut self, interactive: bool) -> Result<TaskSpec, BenchError> {
        let (class, target, distractor) = self.paired_class();
        self.involve(&[&target, &distractor]);
        let usual = self.initial_landmark(&target)?;
        if self.initial_landmark(&distractor)? == usual {
            let elsewhere = self.other_surface(&[&usual], &[])?;
            self.move_to(0, 0, &distractor, &elsewhere);
        }
        let last = self.days - 1;
        let mut receptacle = None;
        if interactive {
            let pair = self.twin_pair()?;
            self.put_away(&target, &pair.receptacle, last, 0)?;
            receptacle = Some(pair);
        } else {
            let dest = self.other_surface(&[&usual], &[])?;
            self.move_to(last, 0, &target, &dest);
        }
        self.move_to(last, 0, &distractor, &usual);
        let (label, prep) = self.label(&usual);
        let text = format!("{} {class} that is usually {prep} the {label}", self.prefix());
        let t = if interactive { TaskType::Interactive } else { TaskType::Visible };
        let hazard = Hazard::UsualPlace {
            landmark: usual,
            distractor: Some(distractor),
        };
        self.finish(&target, text, TaskFamily::SpatialFrequentist, t, hazard, receptacle)
    }

    pub fn commonsense(mut self, k: usize) -> Result<TaskSpec, BenchError> {
        let classes = household_classes(self.scene);
        let (class, _) = classes[k % classes.len()];
        let target = format!("{class}_1");
        match self.world.object(&target).map(|o| &o.location) {
            Some(Location::Inside(_)) => {}
            _ => return Err(self.infeasible(format!("{target} is not hidden in a receptacle"))),
        }
        let text = format!("{} {class}", self.prefix());
        self.finish(
            &target,
            text,
            TaskFamily::Commonsense,
            TaskType::Commonsense,
            Hazard::NeverObserved,
            None,
        )
    }
}
