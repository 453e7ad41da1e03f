use proptest::prelude::*;
use recall_core::*;

fn entity() -> impl Strategy<Value = EntityView> {
    (
        "[a-z]{1,6}_[0-9]",
        prop::sample::select(vec!["mug", "book", "folder", "toy"]),
        prop::collection::vec(prop::sample::select(vec!["red", "green", "small"]), 0..3),
        prop::sample::select(vec!["sink", "study_desk", "cabinet_1"]),
        any::<bool>(),
    )
        .prop_map(|(id, class, attrs, lm, inside)| EntityView {
            entity_id: id,
            class_label: class.to_string(),
            attributes: attrs.into_iter().map(String::from).collect(),
            landmark_id: lm.to_string(),
            containment: if inside { Containment::InsideOpenReceptacle } else { Containment::OpenAir },
        })
}

fn record() -> impl Strategy<Value = MemoryRecord> {
    (
        0u64..10_000,
        -5.0f64..5.0,
        -5.0f64..5.0,
        -10.0f64..10.0,
        prop::collection::vec(entity(), 0..4),
        prop::collection::vec(-1.0f32..1.0, 8),
    )
        .prop_map(|(t, x, y, yaw, mut ents, emb)| {
            ents.dedup_by(|a, b| a.entity_id == b.entity_id);
            let mut seen = std::collections::BTreeSet::new();
            ents.retain(|e| seen.insert(e.entity_id.clone()));
            MemoryRecord {
                t: Timestep::new(t, 200),
                pose: Pose::new(x, y, yaw, "kitchen"),
                embedding: emb,
                raw: SymbolicObservation::oracle(ents).unwrap(),
            }
        })
}

fn reencode<T: serde::Serialize + serde::de::DeserializeOwned>(v: &T) -> (String, T) {
    let s = serde_json::to_string(v).unwrap();
    let back: T = serde_json::from_str(&s).unwrap();
    (s, back)
}

proptest! {
    #[test]
    fn memory_record_round_trips_byte_exact(r in record()) {
        let (s, back) = reencode(&r);
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn working_memory_round_trips(
        tools in prop::collection::vec(prop::sample::select(vec!["navigate", "detect", "pick"]), 0..6),
        ents in prop::collection::vec(entity(), 0..3),
    ) {
        let mut h = WorkingMemory::new(Instruction::labeled("find the mug", TaskFamily::Class, TaskType::Visible), 20);
        for (i, t) in tools.iter().enumerate() {
            let outcome = match i % 3 {
                0 => Outcome::success(),
                1 => Outcome::Perception { detection: Detection { entities: ents.clone(), from_pose: Pose::new(1.0, 2.0, 0.3, "kitchen") } },
                _ => Outcome::failure("not visible"),
            };
            h.push(Action::new(*t).arg("landmark", "sink").arg("r", i as i64), outcome);
        }
        let (s, back) = reencode(&h);
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
