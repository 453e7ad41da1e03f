use recall_bench::{generate_suite, optimal::task_time_sim, optimal_counts, OptimalCounts, SuiteSpec, TaskSpec};
use recall_core::TaskType;
use recall_homesim::Location;

/// Closed-form plan length: an open-air target needs navigate, detect,
/// pick; a target in a closed receptacle also needs open and a second
/// detect.
fn oracle(task: &TaskSpec) -> OptimalCounts {
    let sim = task_time_sim(task).unwrap();
    let w = sim.world();
    match &w.object(&task.target).unwrap().location {
        Location::At(_) => OptimalCounts {
            perception: 1,
            navigation: 1,
            manipulation: 1,
        },
        Location::Inside(r) if !w.landmark(r).unwrap().open => OptimalCounts {
            perception: 2,
            navigation: 1,
            manipulation: 2,
        },
        other => panic!("unexpected target location {other:?}"),
    }
}

#[test]
fn visible_is_three_and_interactive_is_five() {
    let tasks = generate_suite(&SuiteSpec::default()).unwrap();
    for t in &tasks {
        let c = optimal_counts(t).unwrap();
        match t.task_type() {
            TaskType::Visible => {
                assert_eq!(c, OptimalCounts::VISIBLE, "{}", t.id);
                assert_eq!(c.total(), 3);
            }
            TaskType::Interactive => {
                assert_eq!(c, OptimalCounts::INTERACTIVE, "{}", t.id);
                assert_eq!(c.total(), 5);
            }
            TaskType::Commonsense => {}
        }
    }
}

#[test]
fn search_agrees_with_closed_form_on_every_task() {
    for t in generate_suite(&SuiteSpec::default()).unwrap() {
        assert_eq!(optimal_counts(&t).unwrap(), oracle(&t), "{}", t.id);
    }
}

#[test]
fn commonsense_target_one_navigate_away_in_the_open() {
    // A commonsense task whose hidden object was left out on a surface.
    let mut t = generate_suite(&SuiteSpec::default())
        .unwrap()
        .into_iter()
        .find(|t| t.task_type() == TaskType::Commonsense)
        .unwrap();
    let surface = task_time_sim(&t)
        .unwrap()
        .world()
        .landmarks
        .iter()
        .find(|l| !l.receptacle)
        .unwrap()
        .id
        .clone();
    t.schedule.events.push(recall_homesim::ScheduledEvent::new(
        0,
        0,
        recall_homesim::EventOp::Move {
            object: t.target.clone(),
            to: Location::At(surface),
        },
    ));
    let c = optimal_counts(&t).unwrap();
    assert_eq!(
        c,
        OptimalCounts {
            perception: 1,
            navigation: 1,
            manipulation: 1
        }
    );
}
