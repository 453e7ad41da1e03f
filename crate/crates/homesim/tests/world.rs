use std::collections::BTreeMap;

use recall_homesim::{
    export_scene_graph, export_scene_graphs, generate_world, node_id, patrol, EventOp, Location, PatrolPlan, Relation,
    Schedule, ScheduledEvent, Simulation, WorldState, SCENE_IDS,
};

fn sim_at(world: WorldState) -> Simulation {
    Simulation::new(world, &Schedule::new(0), 200).unwrap()
}

fn place(world: &mut WorldState, object: &str, loc: Location) {
    world.objects.iter_mut().find(|o| o.id == object).unwrap().location = loc;
}

#[test]
fn worlds_are_deterministic_and_well_formed() {
    for scene in SCENE_IDS {
        let (w1, s1) = generate_world(1, scene).unwrap();
        let (w2, s2) = generate_world(1, scene).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(s1, s2);
        w1.validate().unwrap();
        assert!(w1.rooms.len() >= 4);
        assert!(w1.landmarks.len() >= 8);
        assert!(w1.objects.len() >= 12);
        let classes: std::collections::BTreeSet<_> = w1.objects.iter().map(|o| &o.class_label).collect();
        assert!(classes.len() >= 5);
        // Identical receptacle pairs: same label, same room.
        let mut pairs: BTreeMap<(String, String), usize> = BTreeMap::new();
        for l in w1.receptacles() {
            *pairs.entry((l.label(), l.room_id.clone())).or_default() += 1;
        }
        assert!(pairs.values().filter(|&&n| n >= 2).count() >= 2, "scene {scene}");
        // Attribute variation within each repeated class.
        for o in &w1.objects {
            let twins: Vec<_> = w1.objects.iter().filter(|p| p.class_label == o.class_label).collect();
            if twins.len() == 2 {
                assert_ne!(twins[0].attributes, twins[1].attributes);
            }
        }
    }
    assert!(generate_world(1, 4).is_err());
    let (a, _) = generate_world(1, 1).unwrap();
    let (b, _) = generate_world(2, 1).unwrap();
    assert_ne!(a, b);
}

#[test]
fn scene_one_summary() {
    let (w, _) = generate_world(7, 1).unwrap();
    assert_eq!((w.rooms.len(), w.landmarks.len(), w.objects.len()), (5, 10, 14));
}

#[test]
fn world_and_schedule_round_trip_as_json() {
    let (w, s) = generate_world(3, 2).unwrap();
    let wj = serde_json::to_string(&w).unwrap();
    let sj = serde_json::to_string(&s).unwrap();
    assert_eq!(serde_json::from_str::<WorldState>(&wj).unwrap(), w);
    assert_eq!(serde_json::from_str::<Schedule>(&sj).unwrap(), s);
    assert_eq!(serde_json::to_string(&serde_json::from_str::<WorldState>(&wj).unwrap()).unwrap(), wj);
}

#[test]
fn patrol_length_and_coverage() {
    let (w, s) = generate_world(1, 1).unwrap();
    let run = patrol(&w, &s, PatrolPlan::new(3, 200).unwrap()).unwrap();
    assert_eq!(run.frames.len(), 600);
    for day in 0..3 {
        let seen: std::collections::BTreeSet<_> = run
            .frames
            .iter()
            .filter(|f| f.t.day == day)
            .map(|f| {
                w.landmarks
                    .iter()
                    .min_by(|a, b| {
                        f.pose.distance_to(a.approach).total_cmp(&f.pose.distance_to(b.approach))
                    })
                    .unwrap()
                    .id
                    .clone()
            })
            .collect();
        assert_eq!(seen.len(), w.landmarks.len());
    }
    for f in &run.frames {
        assert!(w.room(&f.pose.room_id).unwrap().contains(f.pose.position));
    }
    assert_eq!(run.sim.clock(), 600);
    let paper = patrol(&w, &s, PatrolPlan::new(3, 1300).unwrap()).unwrap();
    assert_eq!(paper.frames.len(), 3900);
    assert!(PatrolPlan::new(2, 200).is_err());
    assert!(PatrolPlan::new(7, 200).is_err());
}

#[test]
fn scheduled_move_shows_up_on_the_right_day() {
    let (mut w, _) = generate_world(1, 1).unwrap();
    place(&mut w, "remote_1", Location::At("sink".into()));
    let mut s = Schedule::new(5);
    s.push(ScheduledEvent::moving(2, 0, "remote_1", Location::At("bed".into())));
    let run = patrol(&w, &s, PatrolPlan::new(3, 200).unwrap()).unwrap();
    let sightings = |day: u64| -> std::collections::BTreeSet<String> {
        run.frames
            .iter()
            .filter(|f| f.t.day == day)
            .flat_map(|f| f.observation.visible_entities.iter())
            .filter(|e| e.entity_id == "remote_1")
            .map(|e| e.landmark_id.clone())
            .collect()
    };
    assert_eq!(sightings(1), ["sink".to_string()].into());
    assert_eq!(sightings(2), ["bed".to_string()].into());
}

#[test]
fn navigate_and_clock_contract() {
    let (w, _) = generate_world(1, 1).unwrap();
    let mut sim = sim_at(w);
    assert!(sim.navigate("study_desk").is_success());
    assert_eq!(sim.world().robot.pose.room_id, "study");
    assert_eq!(sim.navigate("nonexistent"), recall_core::Outcome::failure("unknown landmark"));
    assert_eq!(sim.clock(), 2);
}

#[test]
fn occlusion_open_and_pick() {
    let (mut w, _) = generate_world(1, 1).unwrap();
    place(&mut w, "mug_1", Location::Inside("cabinet_1".into()));
    place(&mut w, "mug_2", Location::At("sink".into()));
    let mut sim = sim_at(w);

    sim.navigate("sink");
    let d = sim.detect();
    assert!(d.entities.iter().any(|e| e.entity_id == "mug_2"));
    assert!(!d.entities.iter().any(|e| e.entity_id == "mug_1"));

    assert_eq!(sim.open("cabinet_1"), recall_core::Outcome::failure("out of reach"));
    assert_eq!(sim.open("study_desk"), recall_core::Outcome::failure("not a receptacle"));
    assert_eq!(sim.pick("mug_1"), recall_core::Outcome::failure("not visible"));

    sim.navigate("cabinet_1");
    let d = sim.detect();
    assert!(!d.entities.iter().any(|e| e.entity_id == "mug_1"));
    assert!(sim.open("cabinet_1").is_success());
    let d = sim.detect();
    assert!(d.entities.iter().any(|e| e.entity_id == "mug_1"));
    assert!(sim.pick("mug_1").is_success());
    assert_eq!(sim.world().robot.inventory, vec!["mug_1".to_string()]);
    assert_eq!(sim.pick("mug_1"), recall_core::Outcome::failure("already held"));
    // Wrong-but-visible objects can still be picked at skill level.
    assert!(sim.pick("mug_2").is_success());
}

#[test]
fn pick_needs_a_fresh_detection() {
    let (mut w, _) = generate_world(1, 1).unwrap();
    place(&mut w, "mug_1", Location::At("sink".into()));
    let mut sim = sim_at(w);
    sim.navigate("sink");
    assert_eq!(sim.pick("mug_1"), recall_core::Outcome::failure("not detected"));
    sim.detect();
    assert!(sim.pick("mug_1").is_success());
}

#[test]
fn open_needs_a_scan_of_the_receptacle() {
    let (w, _) = generate_world(1, 1).unwrap();
    let mut sim = sim_at(w);
    sim.navigate("cabinet_2");
    assert_eq!(sim.open("cabinet_2"), recall_core::Outcome::failure("receptacle not perceived"));
    sim.detect();
    assert!(sim.open("cabinet_2").is_success());
}

#[test]
fn schedule_events_fire_mid_episode() {
    let (mut w, _) = generate_world(1, 1).unwrap();
    place(&mut w, "laptop_1", Location::At("study_desk".into()));
    let mut s = Schedule::new(1);
    s.push(ScheduledEvent::moving(0, 3, "laptop_1", Location::At("bed".into())));
    s.push(ScheduledEvent::new(0, 3, EventOp::Open { receptacle: "drawer_1".into() }));
    let mut sim = Simulation::new(w, &s, 200).unwrap();
    sim.navigate("study_desk");
    assert!(sim.detect().entities.iter().any(|e| e.entity_id == "laptop_1"));
    sim.detect();
    assert_eq!(sim.clock(), 3);
    assert!(!sim.detect().entities.iter().any(|e| e.entity_id == "laptop_1"));
    assert!(sim.world().landmark("drawer_1").unwrap().open);
}

#[test]
fn bad_schedule_is_rejected() {
    let (w, _) = generate_world(1, 1).unwrap();
    let mut s = Schedule::new(1);
    s.push(ScheduledEvent::moving(0, 3, "ghost", Location::At("bed".into())));
    assert!(Simulation::new(w.clone(), &s, 200).is_err());
    let mut s = Schedule::new(1);
    s.push(ScheduledEvent::moving(0, 3, "mug_1", Location::Inside("bed".into())));
    assert!(Simulation::new(w.clone(), &s, 200).is_err());
    let mut s = Schedule::new(1);
    s.push(ScheduledEvent::moving(0, 300, "mug_1", Location::At("bed".into())));
    assert!(Simulation::new(w, &s, 200).is_err());
}

#[test]
fn scene_graph_days_differ_only_by_moved_object() {
    let (mut w, _) = generate_world(1, 1).unwrap();
    place(&mut w, "mug_1", Location::At("sink".into()));
    let mut s = Schedule::new(2);
    s.push(ScheduledEvent::moving(1, 50, "mug_1", Location::At("bed".into())));
    let graphs = export_scene_graphs(&w, &s, 3, 200).unwrap();
    let mug = node_id(&w, "mug_1");
    let sink = node_id(&w, "sink");
    let day0 = &graphs[0];
    let edge = day0.placement(&mug).unwrap();
    assert_eq!((edge.relation, edge.to.as_str()), (Relation::At, sink.as_str()));
    assert_eq!(day0.node(&sink).unwrap().label, "sink");
    let diff: Vec<_> = graphs[1].edges.iter().filter(|e| !day0.edges.contains(e)).collect();
    assert_eq!(diff.len(), 1);
    assert_eq!(diff[0].from, mug);
    for g in &graphs {
        assert!(g.node(&mug).is_some());
        assert_eq!(g.nodes.iter().map(|n| &n.id).collect::<Vec<_>>(), day0.nodes.iter().map(|n| &n.id).collect::<Vec<_>>());
    }
    assert!(export_scene_graph(&w, &s, 3, 3, 200).is_err());
    assert_eq!(export_scene_graph(&w, &s, 1, 3, 200).unwrap(), graphs[1]);
}
