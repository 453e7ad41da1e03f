//! Hand-shaped task sets with known expected behaviour for the scripted
//! policies. Each set cycles through the three scenes.

use recall_core::{derive_seed, TaskFamily, TaskType};
use recall_homesim::SCENE_IDS;

use crate::generate::{task_id, with_retries, Draft};
use crate::task::{Hazard, TaskSpec};
use crate::BenchError;

fn scene(i: usize) -> u8 {
    SCENE_IDS[i % SCENE_IDS.len()]
}

fn base(seed: u64, set: u64, i: usize) -> u64 {
    derive_seed(derive_seed(seed, set), i as u64)
}

/// Visible class, attribute and spatial tasks (in rotation) whose target
/// never moves during patrol.
pub fn unmoved_visible(n: usize, seed: u64, tpd: u64) -> Result<Vec<TaskSpec>, BenchError> {
    (0..n)
        .map(|i| {
            let family = [TaskFamily::Class, TaskFamily::Attribute, TaskFamily::Spatial][i % 3];
            let id = format!("fx-unmoved-{}", task_id(scene(i), TaskType::Visible, family, i));
            with_retries(&id, scene(i), base(seed, 1, i), tpd, |mut d: Draft| {
                d.pin_target = true;
                match family {
                    TaskFamily::Class => d.class(false),
                    TaskFamily::Attribute => d.attribute(false),
                    _ => d.spatial(false),
                }
            })
        })
        .collect()
}

/// "yesterday" tasks where the target sat at the referenced landmark for
/// the first half of the last patrol day, spent the rest of the day in
/// another room, and went back to the referenced landmark at task time.
/// The twin lives in a third room throughout.
pub fn moved_after_patrol(n: usize, seed: u64, tpd: u64) -> Result<Vec<TaskSpec>, BenchError> {
    (0..n)
        .map(|i| {
            let id = format!("fx-moved-{}", task_id(scene(i), TaskType::Visible, TaskFamily::SpatialTemporal, i));
            with_retries(&id, scene(i), base(seed, 2, i), tpd, |mut d: Draft| {
                let (class, target, twin) = d.paired_class();
                d.involve(&[&target, &twin]);
                let home = d.initial_landmark(&target)?;
                let home_room = d.room_of(&home);
                let mid = d.other_surface(&[&home], &[home_room.clone()])?;
                let mid_room = d.room_of(&mid);
                let away = d.other_surface(&[&home, &mid], &[home_room, mid_room])?;
                let last = d.days - 1;
                d.move_to(0, 0, &twin, &away);
                d.move_to(last, d.tpd / 2, &target, &mid);
                d.move_to(d.days, 0, &target, &home);
                let (label, prep) = d.label(&home);
                let text = format!("{} {class} that was {prep} the {label} yesterday", d.prefix());
                let hazard = Hazard::MovedSince {
                    day: last,
                    landmark: home,
                    distractor: Some(twin),
                };
                d.finish(&target, text, TaskFamily::SpatialTemporal, TaskType::Visible, hazard, None)
            })
        })
        .collect()
}

/// Interactive class and attribute tasks (alternating): the target was put
/// away in one of two identical receptacles in the same room.
pub fn twin_interactive(n: usize, seed: u64, tpd: u64) -> Result<Vec<TaskSpec>, BenchError> {
    (0..n)
        .map(|i| {
            let family = [TaskFamily::Class, TaskFamily::Attribute][i % 2];
            let id = format!("fx-twin-{}", task_id(scene(i), TaskType::Interactive, family, i));
            with_retries(&id, scene(i), base(seed, 3, i), tpd, |mut d: Draft| {
                d.pin_target = true;
                match family {
                    TaskFamily::Class => d.class(true),
                    _ => d.attribute(true),
                }
            })
        })
        .collect()
}

/// Never-observed household objects hidden in a receptacle of their
/// usual room.
pub fn commonsense(n: usize, seed: u64, tpd: u64) -> Result<Vec<TaskSpec>, BenchError> {
    (0..n)
        .map(|i| {
            let id = format!("fx-cs-{}", task_id(scene(i), TaskType::Commonsense, TaskFamily::Commonsense, i));
            let k = i / SCENE_IDS.len();
            with_retries(&id, scene(i), base(seed, 4, i), tpd, |d: Draft| d.commonsense(k))
        })
        .collect()
}
