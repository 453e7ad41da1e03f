//! Re-checks each task's defining hazard against ground truth.

use std::collections::BTreeMap;

use recall_core::Containment;
use recall_homesim::{generate_world, patrol, Location, PatrolPlan, Simulation};

use crate::optimal::task_time_sim;
use crate::task::{Hazard, TaskSpec};
use crate::BenchError;

/// Ticks the target spent at each landmark, per patrol day.
fn daily_ticks(task: &TaskSpec) -> Result<Vec<BTreeMap<String, u64>>, BenchError> {
    let (world, _) = generate_world(task.layout_seed, task.scene_id)?;
    let mut sim = Simulation::new(world, &task.schedule, task.ticks_per_day)?;
    let mut out = Vec::new();
    for day in 0..task.patrol_days {
        let mut ticks: BTreeMap<String, u64> = BTreeMap::new();
        for t in day * task.ticks_per_day..(day + 1) * task.ticks_per_day {
            sim.advance_to(t);
            if let Some(l) = sim.world().object_landmark(&task.target) {
                *ticks.entry(l.to_string()).or_default() += 1;
            }
        }
        out.push(ticks);
    }
    Ok(out)
}

/// Landmark the target occupied for most of each patrol day.
fn daily_landmarks(task: &TaskSpec) -> Result<Vec<Option<String>>, BenchError> {
    Ok(daily_ticks(task)?
        .into_iter()
        .map(|ticks| ticks.into_iter().max_by_key(|(_, n)| *n).map(|(l, _)| l))
        .collect())
}

/// `Ok(())` when the hazard holds, otherwise a description of what broke.
pub fn check_hazard(task: &TaskSpec) -> Result<(), String> {
    let err = |e: BenchError| e.to_string();
    let now = task_time_sim(task).map_err(err)?;
    let w = now.world();
    let target = w.object(&task.target).ok_or("target missing")?;
    let here = w.object_landmark(&task.target).ok_or("target held at task time")?.to_string();
    match &task.hazard {
        Hazard::UniqueClass => {
            let n = w.objects.iter().filter(|o| o.class_label == target.class_label).count();
            if n != 1 {
                return Err(format!("{n} instances of {}", target.class_label));
            }
        }
        Hazard::AttributeTwin { distractor } => {
            let d = w.object(distractor).ok_or("distractor missing")?;
            if d.class_label != target.class_label || d.attributes == target.attributes {
                return Err("distractor is not a same-class, different-attribute instance".into());
            }
        }
        Hazard::SpatialPair { distractor, landmark } => {
            let d = w.object(distractor).ok_or("distractor missing")?;
            if d.class_label != target.class_label {
                return Err("distractor class differs".into());
            }
            if &here != landmark {
                return Err(format!("target at {here}, expected {landmark}"));
            }
            if w.object_landmark(distractor) == Some(landmark.as_str()) {
                return Err("distractor shares the named landmark".into());
            }
        }
        Hazard::MovedSince {
            day,
            landmark,
            distractor,
        } => {
            let days = daily_ticks(task).map_err(err)?;
            let on_day = days.get(*day as usize).ok_or("reference day outside the patrol")?;
            if !on_day.contains_key(landmark) {
                return Err(format!("target was never at {landmark} on day {day}: {on_day:?}"));
            }
            if &here == landmark {
                return Err("target is back where it was on the reference day".into());
            }
            if let Some(d) = distractor {
                if w.object_landmark(d) != Some(landmark.as_str()) {
                    return Err("distractor is not at the reference landmark".into());
                }
            }
        }
        Hazard::UsualPlace { landmark, distractor } => {
            let days = daily_landmarks(task).map_err(err)?;
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for l in days.iter().flatten() {
                *counts.entry(l.as_str()).or_default() += 1;
            }
            let usual = counts.get(landmark.as_str()).copied().unwrap_or(0);
            if counts.iter().any(|(l, n)| *l != landmark && *n >= usual) {
                return Err(format!("{landmark} is not the strict modal landmark: {counts:?}"));
            }
            if days.last().cloned().flatten().as_deref() == Some(landmark.as_str()) {
                return Err("target was at its usual place on the last day".into());
            }
            if &here == landmark {
                return Err("target is at its usual place at task time".into());
            }
            if let Some(d) = distractor {
                if w.object_landmark(d) != Some(landmark.as_str()) {
                    return Err("distractor is not at the usual landmark".into());
                }
            }
        }
        Hazard::NeverObserved => {
            let (world, _) = generate_world(task.layout_seed, task.scene_id).map_err(|e| e.to_string())?;
            let plan = PatrolPlan::new(task.patrol_days, task.ticks_per_day).map_err(|e| e.to_string())?;
            let run = patrol(&world, &task.schedule, plan).map_err(|e| e.to_string())?;
            if run
                .frames
                .iter()
                .any(|f| f.observation.visible_entities.iter().any(|e| e.entity_id == task.target))
            {
                return Err("target appears in the patrol stream".into());
            }
        }
    }
    if let Some(tr) = &task.receptacle {
        if target.location != Location::Inside(tr.receptacle.clone()) {
            return Err(format!("target not inside {}", tr.receptacle));
        }
        let (a, b) = (
            w.landmark(&tr.receptacle).ok_or("receptacle missing")?,
            w.landmark(&tr.twin).ok_or("twin missing")?,
        );
        if a.room_id != b.room_id || a.label() != b.label() || !a.receptacle || !b.receptacle {
            return Err("receptacles are not identical twins".into());
        }
        if a.open {
            return Err("receptacle left open".into());
        }
        let (world, _) = generate_world(task.layout_seed, task.scene_id).map_err(|e| e.to_string())?;
        let plan = PatrolPlan::new(task.patrol_days, task.ticks_per_day).map_err(|e| e.to_string())?;
        let run = patrol(&world, &task.schedule, plan).map_err(|e| e.to_string())?;
        let seen_inside = run.frames.iter().any(|f| {
            f.observation.visible_entities.iter().any(|e| {
                e.entity_id == task.target
                    && e.containment == Containment::InsideOpenReceptacle
                    && e.landmark_id == tr.receptacle
            })
        });
        if !seen_inside {
            return Err("the patrol never saw the target inside its receptacle".into());
        }
    }
    Ok(())
}
