mod common;

use recall_agent::tools::{NAVIGATE, TEMPORAL_WINDOW_QUERY};
use recall_agent::{
    PriorTable, RandomPolicy, SceneGraphPolicy, StarConfig, StarPolicy, TemporalRetrievalPolicy, Termination,
};
use recall_core::{ActionCategory, ToolDomain};
use recall_homesim::{generate_world, Location, Schedule};

#[test]
fn random_never_queries_memory() {
    for seed in 0..100u64 {
        let mut s = common::setup(seed % 5);
        let mut p = RandomPolicy::new(seed);
        let r = common::run(&mut s, "find the black toy", "toy_1", &mut p, 20);
        assert_eq!(r.action_counts.temporal_query, 0, "seed {seed}");
        assert!(r.categories.iter().all(|c| c.domain() == ToolDomain::Spatial));
    }
}

#[test]
fn random_on_a_single_landmark_world_succeeds_quickly() {
    let (mut world, _) = generate_world(3, 1).unwrap();
    let keep = world.object_landmark("laptop_1").unwrap().to_string();
    world.landmarks.retain(|l| l.id == keep);
    world.objects.retain(|o| o.location == Location::At(keep.clone()));
    let mut s = common::setup_from(&world, &Schedule::new(0));
    for seed in 0..10 {
        let mut p = RandomPolicy::new(seed);
        let mut s2 = common::setup_from(&world, &Schedule::new(0));
        let r = common::run(&mut s2, "find the laptop", "laptop_1", &mut p, 20);
        assert!(r.success, "seed {seed}: {:?}", r.termination);
        assert!(r.steps_used <= 3);
    }
    let _ = &mut s;
}

#[test]
fn temporal_retrieval_on_an_unmoved_object_uses_three_physical_actions() {
    let mut s = common::setup(7);
    let mut p = TemporalRetrievalPolicy::new();
    let r = common::run(&mut s, "find the black mug", "mug_2", &mut p, 20);
    assert!(r.success);
    assert_eq!(r.action_counts.physical(), 3);
    let tools: Vec<_> = r.trace.steps().iter().rev().take(3).map(|s| s.action.tool.as_str()).collect();
    assert_eq!(tools, ["pick", "detect", "navigate"]);
}

#[test]
fn temporal_retrieval_queries_the_named_day() {
    let mut s = common::setup(7);
    let lm = s.sim.world().object_landmark("remote_1").unwrap().to_string();
    let label = s.sim.world().landmark(&lm).unwrap().label();
    let text = format!("find the remote that was on the {label} yesterday");
    let mut p = TemporalRetrievalPolicy::new();
    let r = common::run(&mut s, &text, "remote_1", &mut p, 20);
    let window = r
        .trace
        .steps()
        .iter()
        .find(|st| st.action.tool == TEMPORAL_WINDOW_QUERY)
        .expect("a day-window probe");
    let yesterday = common::DAYS as i64 - 1;
    assert_eq!(window.action.int("day_start"), Some(yesterday));
    assert_eq!(window.action.int("day_end"), Some(yesterday));
    assert!(r.success);
}

#[test]
fn star_falls_back_on_the_prior_table() {
    let mut s = common::setup(7);
    let mut p = StarPolicy::new(StarConfig::default());
    let r = common::run(&mut s, "find the milk", "milk_1", &mut p, 20);
    let first_nav = r.trace.steps().iter().find(|st| st.action.tool == NAVIGATE).unwrap();
    let lm = first_nav.action.text("landmark").unwrap();
    assert_eq!(s.sim.world().landmark(lm).unwrap().room_id, "kitchen");
    assert!(r.success);

    // Without a prior entry it still sweeps, just not kitchen-first by design.
    let cfg = StarConfig {
        prior: PriorTable::default(),
        ..StarConfig::default()
    };
    let mut s = common::setup(7);
    let r = common::run(&mut s, "find the socks", "socks_1", &mut StarPolicy::new(cfg), 20);
    assert!(r.action_counts.navigation >= 1);
}

#[test]
fn star_commits_when_budget_is_low() {
    let mut s = common::setup(7);
    let cfg = StarConfig {
        commit_threshold: 20,
        ..StarConfig::default()
    };
    let r = common::run(&mut s, "find the black mug", "mug_2", &mut StarPolicy::new(cfg), 20);
    assert_eq!(r.action_counts.temporal_query, 0);
}

#[test]
fn scene_graph_resolves_unique_class() {
    let mut s = common::setup(7);
    let mut p = SceneGraphPolicy::new(s.graphs.clone(), 0);
    let expected = s.sim.world().object_landmark("laptop_1").unwrap().to_string();
    let r = common::run(&mut s, "find the laptop", "laptop_1", &mut p, 20);
    assert!(r.success);
    assert_eq!(r.trace.steps()[0].action.text("landmark"), Some(expected.as_str()));
    assert_eq!(r.action_counts.temporal_query, 0);
}

#[test]
fn scene_graph_separates_same_class_by_attribute() {
    // Both mugs share the class label; only the attribute fields differ.
    for seed in [1u64, 7, 21] {
        // Drop moves that land after the last snapshot.
        let (world, mut schedule) = generate_world(seed, 1).unwrap();
        schedule.events.retain(|e| e.day < common::DAYS);
        let s = common::setup_from(&world, &schedule);
        let mugs: Vec<_> = s
            .sim
            .world()
            .objects
            .iter()
            .filter(|o| o.class_label == "mug")
            .map(|o| (o.id.clone(), o.attributes.join(" ")))
            .collect();
        assert_eq!(mugs.len(), 2);
        for (id, attrs) in mugs {
            let mut s2 = common::setup_from(&world, &schedule);
            let mut p = SceneGraphPolicy::new(s2.graphs.clone(), seed);
            let r = common::run(&mut s2, &format!("find the {attrs} mug"), &id, &mut p, 20);
            assert!(r.success, "seed {seed} {attrs} mug: {:?}", r.abort_reason);
        }
    }
}

#[test]
fn scene_graph_aborts_on_unresolvable_reference() {
    let mut s = common::setup(7);
    let mut p = SceneGraphPolicy::new(s.graphs.clone(), 0);
    let r = common::run(&mut s, "find the violin", "mug_1", &mut p, 20);
    assert_eq!(r.termination, Termination::PolicyAbort);
    assert_eq!(r.steps_used, 0);
    let _ = ActionCategory::Navigation;
}
