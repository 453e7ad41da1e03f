//! Ground-truth minimal plans by breadth-first search over skill
//! sequences from the task-time world.

use std::collections::{BTreeSet, VecDeque};

use recall_core::{ActionCategory, Outcome};
use recall_homesim::{generate_world, Location, Simulation};

use crate::task::{OptimalCounts, TaskSpec};
use crate::BenchError;

const MAX_DEPTH: usize = 8;

#[derive(Debug, Clone)]
enum Skill {
    Navigate(String),
    Detect,
    Open(String),
    Pick,
}

impl Skill {
    fn category(&self) -> ActionCategory {
        match self {
            Skill::Navigate(_) => ActionCategory::Navigation,
            Skill::Detect => ActionCategory::Perception,
            Skill::Open(_) | Skill::Pick => ActionCategory::Manipulation,
        }
    }
}

/// The world as the agent finds it: schedule replayed to task time, robot
/// docked.
pub fn task_time_sim(task: &TaskSpec) -> Result<Simulation, BenchError> {
    let (world, _) = generate_world(task.layout_seed, task.scene_id)?;
    let mut sim = Simulation::new(world, &task.schedule, task.ticks_per_day)?;
    sim.advance_to(task.task_time());
    sim.dock_robot();
    Ok(sim)
}

type Key = (Option<String>, bool, bool, Vec<bool>);

fn key(sim: &Simulation, target: &str) -> Key {
    let w = sim.world();
    (
        w.robot.focus.clone(),
        w.robot.scanned,
        w.robot.perceived.contains(target),
        w.landmarks.iter().map(|l| l.open).collect(),
    )
}

/// Category counts of a shortest successful plan for the task's target.
pub fn optimal_counts(task: &TaskSpec) -> Result<OptimalCounts, BenchError> {
    let start = task_time_sim(task)?;
    if start.world().object(&task.target).is_none() {
        return Err(BenchError::InvalidArgument(format!("{}: unknown target {}", task.id, task.target)));
    }
    let mut skills: Vec<Skill> = start
        .world()
        .landmarks
        .iter()
        .map(|l| Skill::Navigate(l.id.clone()))
        .collect();
    skills.push(Skill::Detect);
    skills.extend(start.world().receptacles().map(|l| Skill::Open(l.id.clone())));
    skills.push(Skill::Pick);

    let mut seen = BTreeSet::new();
    seen.insert(key(&start, &task.target));
    let mut queue = VecDeque::from([(start, Vec::<ActionCategory>::new())]);
    while let Some((sim, plan)) = queue.pop_front() {
        if plan.len() >= MAX_DEPTH {
            continue;
        }
        for s in &skills {
            let mut next = sim.clone();
            let ok = match s {
                Skill::Navigate(l) => next.navigate(l).is_success(),
                Skill::Detect => {
                    next.detect();
                    true
                }
                Skill::Open(r) => next.open(r).is_success(),
                Skill::Pick => matches!(next.pick(&task.target), Outcome::SkillResult { success: true, .. }),
            };
            if !ok {
                continue;
            }
            let mut p = plan.clone();
            p.push(s.category());
            if next.world().object(&task.target).map(|o| &o.location) == Some(&Location::Held) {
                let mut counts = OptimalCounts::default();
                p.into_iter().for_each(|c| counts.add(c));
                return Ok(counts);
            }
            if seen.insert(key(&next, &task.target)) {
                queue.push_back((next, p));
            }
        }
    }
    Err(BenchError::Infeasible {
        task: task.id.clone(),
        constraint: format!("target unreachable within {MAX_DEPTH} skills"),
    })
}
