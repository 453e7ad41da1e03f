use proptest::prelude::*;
use recall_bench::{
    check_hazard, expected_counts, generate_suite, generate_task, optimal_counts, Hazard, SuiteSpec, TaskSpec,
    PAPER_PER_FAMILY,
};
use recall_core::{TaskFamily, TaskType};
use recall_homesim::{generate_world, Location, Simulation};

fn count(tasks: &[TaskSpec]) -> (usize, usize, usize) {
    let n = |t| tasks.iter().filter(|x| x.task_type() == t).count();
    (n(TaskType::Visible), n(TaskType::Interactive), n(TaskType::Commonsense))
}

#[test]
fn desk_scale_counts() {
    let spec = SuiteSpec::default();
    assert_eq!(expected_counts(&spec), (45, 30, 9));
    let tasks = generate_suite(&spec).unwrap();
    assert_eq!(count(&tasks), (45, 30, 9));
}

#[test]
fn paper_scale_counts() {
    let spec = SuiteSpec {
        per_family: PAPER_PER_FAMILY,
        ..SuiteSpec::default()
    };
    assert_eq!(expected_counts(&spec), (225, 90, 45));
}

#[test]
fn ids_are_unique_and_suite_is_reproducible() {
    let spec = SuiteSpec::default();
    let a = generate_suite(&spec).unwrap();
    let b = generate_suite(&spec).unwrap();
    assert_eq!(a, b);
    let mut ids: Vec<_> = a.iter().map(|t| t.id.clone()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), a.len());
    let other = generate_suite(&SuiteSpec { seed: 2, ..spec }).unwrap();
    assert_ne!(a, other);
}

#[test]
fn every_default_task_satisfies_its_hazard() {
    for t in generate_suite(&SuiteSpec::default()).unwrap() {
        check_hazard(&t).unwrap_or_else(|e| panic!("{}: {e}", t.id));
    }
}

fn location_at(task: &TaskSpec, t: u64) -> Location {
    let (world, _) = generate_world(task.layout_seed, task.scene_id).unwrap();
    let mut sim = Simulation::new(world, &task.schedule, task.ticks_per_day).unwrap();
    sim.advance_to(t);
    sim.world().object(&task.target).unwrap().location.clone()
}

#[test]
fn spatial_temporal_target_left_the_reference_landmark() {
    let tasks = generate_suite(&SuiteSpec::default()).unwrap();
    let st: Vec<_> = tasks.iter().filter(|t| t.family() == TaskFamily::SpatialTemporal).collect();
    assert!(!st.is_empty());
    for t in st {
        let Hazard::MovedSince { day, landmark, .. } = &t.hazard else {
            panic!("{}: unexpected hazard", t.id)
        };
        let was = location_at(t, day * t.ticks_per_day);
        assert_eq!(was, Location::At(landmark.clone()), "{}", t.id);
        let now = location_at(t, t.task_time());
        assert_ne!(was, now, "{}", t.id);
    }
}

#[test]
fn instructions_never_name_the_entity_id() {
    for t in generate_suite(&SuiteSpec::default()).unwrap() {
        assert!(!t.instruction.text.contains(&t.target), "{}", t.id);
    }
}

#[test]
fn interactive_targets_sit_in_one_of_two_identical_receptacles() {
    for t in generate_suite(&SuiteSpec::default()).unwrap() {
        if t.task_type() != TaskType::Interactive {
            continue;
        }
        let tr = t.receptacle.as_ref().expect("interactive tasks name their receptacle");
        assert_ne!(tr.receptacle, tr.twin);
        assert_eq!(location_at(&t, t.task_time()), Location::Inside(tr.receptacle.clone()), "{}", t.id);
    }
}

#[test]
fn zero_per_family_and_unknown_scene_are_rejected() {
    assert!(generate_suite(&SuiteSpec {
        per_family: 0,
        ..SuiteSpec::default()
    })
    .is_err());
    let err = generate_task(1, 9, TaskType::Visible, TaskFamily::Class, 0, 200).unwrap_err();
    assert!(err.to_string().contains("scene"), "{err}");
}

#[test]
fn stored_optimal_counts_match_recomputation() {
    for t in generate_suite(&SuiteSpec::default()).unwrap().iter().step_by(7) {
        assert_eq!(optimal_counts(t).unwrap(), t.optimal, "{}", t.id);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_tasks_are_sound(
        seed in any::<u64>(),
        scene in 1u8..=3,
        ty in 0usize..3,
        fam in 0usize..5,
        k in 0usize..4,
    ) {
        let task_type = [TaskType::Visible, TaskType::Interactive, TaskType::Commonsense][ty];
        let family = if task_type == TaskType::Commonsense {
            TaskFamily::Commonsense
        } else {
            TaskFamily::MEMORY[fam]
        };
        let t = generate_task(seed, scene, task_type, family, k, 200).unwrap();
        prop_assert_eq!(t.task_type(), task_type);
        prop_assert_eq!(t.family(), family);
        prop_assert!((3..=6).contains(&t.patrol_days));
        if let Err(e) = check_hazard(&t) {
            prop_assert!(false, "{}: {}", t.id, e);
        }
    }
}
