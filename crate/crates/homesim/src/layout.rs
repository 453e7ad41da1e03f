//! The three built-in apartments.
//!
//! Layouts (rooms, landmarks, receptacles) are fixed per scene; the layout
//! seed decides object colors, initial placement and the background
//! schedule. Every scene has a hallway holding the robot dock and two
//! pairs of identical receptacles standing side by side in one room.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use recall_core::{derive_seed, Pose};

use crate::schedule::{Schedule, ScheduledEvent};
use crate::world::{Landmark, Location, Object, Robot, Room, WorldState};
use crate::SimError;

pub const SCENE_IDS: [u8; 3] = [1, 2, 3];
/// Days of background activity generated with every world.
pub const BACKGROUND_DAYS: u64 = 7;

const PALETTE: [&str; 10] = [
    "red", "blue", "green", "black", "white", "yellow", "grey", "orange", "purple", "brown",
];

/// Classes present twice per scene (same class, different color).
pub const PAIRED_CLASSES: [&str; 4] = ["mug", "folder", "book", "toy"];
/// Classes present once per scene.
pub const SINGLE_CLASSES: [&str; 3] = ["remote", "laptop", "plant"];

/// Classes that live hidden in a receptacle of their usual room.
pub fn household_classes(scene_id: u8) -> &'static [(&'static str, &'static str)] {
    match scene_id {
        1 => &[("milk", "kitchen"), ("cereal", "kitchen"), ("socks", "bedroom")],
        2 => &[("milk", "kitchen"), ("socks", "bedroom"), ("toothpaste", "bathroom")],
        _ => &[("milk", "kitchen"), ("toothpaste", "bathroom"), ("stapler", "study")],
    }
}

struct LandmarkDef(&'static str, &'static str, [f64; 2], bool);

fn rooms(scene_id: u8) -> Vec<Room> {
    let r = |id: &str, min: [f64; 2], max: [f64; 2]| Room {
        id: id.into(),
        min,
        max,
    };
    match scene_id {
        1 => vec![
            r("hallway", [4.0, 0.0], [6.0, 8.0]),
            r("kitchen", [0.0, 0.0], [4.0, 4.0]),
            r("study", [0.0, 4.0], [4.0, 8.0]),
            r("bedroom", [6.0, 0.0], [10.0, 4.0]),
            r("bathroom", [6.0, 4.0], [10.0, 8.0]),
        ],
        2 => vec![
            r("hallway", [5.0, 0.0], [7.0, 10.0]),
            r("kitchen", [0.0, 0.0], [5.0, 5.0]),
            r("living_room", [0.0, 5.0], [5.0, 10.0]),
            r("bedroom", [7.0, 0.0], [12.0, 5.0]),
            r("bathroom", [7.0, 5.0], [12.0, 10.0]),
        ],
        _ => vec![
            r("hallway", [6.0, 0.0], [8.0, 12.0]),
            r("kitchen", [0.0, 0.0], [6.0, 4.0]),
            r("dining_room", [0.0, 4.0], [6.0, 8.0]),
            r("living_room", [0.0, 8.0], [6.0, 12.0]),
            r("study", [8.0, 0.0], [14.0, 4.0]),
            r("bedroom", [8.0, 4.0], [14.0, 8.0]),
            r("bathroom", [8.0, 8.0], [14.0, 12.0]),
        ],
    }
}

fn landmarks(scene_id: u8) -> Vec<LandmarkDef> {
    use LandmarkDef as L;
    match scene_id {
        1 => vec![
            L("sink", "kitchen", [0.6, 3.4], false),
            L("kitchen_counter", "kitchen", [2.0, 3.4], false),
            L("cabinet_1", "kitchen", [3.0, 0.6], true),
            L("cabinet_2", "kitchen", [3.6, 0.6], true),
            L("study_desk", "study", [1.0, 7.4], false),
            L("bookshelf", "study", [3.0, 7.4], false),
            L("bed", "bedroom", [8.0, 3.4], false),
            L("drawer_1", "bedroom", [6.6, 0.6], true),
            L("drawer_2", "bedroom", [7.2, 0.6], true),
            L("bathroom_counter", "bathroom", [8.0, 7.4], false),
        ],
        2 => vec![
            L("kitchen_counter", "kitchen", [1.0, 4.4], false),
            L("dining_table", "kitchen", [2.5, 2.5], false),
            L("cupboard_1", "kitchen", [4.0, 0.6], true),
            L("cupboard_2", "kitchen", [4.6, 0.6], true),
            L("sofa", "living_room", [1.0, 9.4], false),
            L("tv_stand", "living_room", [3.0, 5.6], false),
            L("armchair", "living_room", [4.4, 9.4], false),
            L("nightstand", "bedroom", [11.4, 4.4], false),
            L("wardrobe_1", "bedroom", [7.6, 0.6], true),
            L("wardrobe_2", "bedroom", [8.2, 0.6], true),
            L("bathroom_sink", "bathroom", [9.0, 9.4], false),
            L("bathroom_cabinet", "bathroom", [11.4, 9.4], true),
        ],
        _ => vec![
            L("sink", "kitchen", [0.6, 3.4], false),
            L("kitchen_counter", "kitchen", [3.0, 3.4], false),
            L("cabinet_1", "kitchen", [4.8, 0.6], true),
            L("cabinet_2", "kitchen", [5.4, 0.6], true),
            L("dining_table", "dining_room", [3.0, 6.0], false),
            L("sofa", "living_room", [1.0, 11.4], false),
            L("coffee_table", "living_room", [3.0, 10.0], false),
            L("bookshelf", "living_room", [5.4, 11.4], false),
            L("study_desk", "study", [11.0, 3.4], false),
            L("drawer_1", "study", [8.6, 0.6], true),
            L("drawer_2", "study", [9.2, 0.6], true),
            L("bed", "bedroom", [11.0, 7.4], false),
            L("bathroom_counter", "bathroom", [9.0, 11.4], false),
            L("bathroom_cabinet", "bathroom", [13.4, 11.4], true),
        ],
    }
}

fn dock(scene_id: u8) -> Pose {
    match scene_id {
        1 => Pose::new(5.0, 0.5, std::f64::consts::FRAC_PI_2, "hallway"),
        2 => Pose::new(6.0, 0.5, std::f64::consts::FRAC_PI_2, "hallway"),
        _ => Pose::new(7.0, 0.5, std::f64::consts::FRAC_PI_2, "hallway"),
    }
}

/// Builds scene `scene_id` with colors, placement and background moves
/// drawn from `layout_seed`.
pub fn generate_world(layout_seed: u64, scene_id: u8) -> Result<(WorldState, Schedule), SimError> {
    if !SCENE_IDS.contains(&scene_id) {
        return Err(SimError::InvalidArgument(format!("unknown scene {scene_id} (expected 1, 2 or 3)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(layout_seed, u64::from(scene_id)));
    let rooms = rooms(scene_id);
    let landmarks: Vec<Landmark> = landmarks(scene_id)
        .into_iter()
        .map(|LandmarkDef(id, room, approach, receptacle)| Landmark {
            id: id.into(),
            room_id: room.into(),
            approach,
            // Facing the room centre.
            yaw: {
                let r = rooms.iter().find(|r| r.id == room).expect("room defined");
                let c = [(r.min[0] + r.max[0]) / 2.0, (r.min[1] + r.max[1]) / 2.0];
                (c[1] - approach[1]).atan2(c[0] - approach[0])
            },
            receptacle,
            open: false,
        })
        .collect();
    let surfaces: Vec<String> = landmarks.iter().filter(|l| !l.receptacle).map(|l| l.id.clone()).collect();

    let mut objects = Vec::new();
    let mut spots = surfaces.clone();
    spots.shuffle(&mut rng);
    let mut next_spot = 0usize;
    let mut take_spot = || {
        let s = spots[next_spot % spots.len()].clone();
        next_spot += 1;
        s
    };
    for class in PAIRED_CLASSES {
        let colors: Vec<&str> = PALETTE.choose_multiple(&mut rng, 2).copied().collect();
        for (i, color) in colors.iter().enumerate() {
            objects.push(Object {
                id: format!("{class}_{}", i + 1),
                class_label: class.into(),
                attributes: vec![(*color).into()],
                location: Location::At(take_spot()),
            });
        }
    }
    for class in SINGLE_CLASSES {
        let color = PALETTE.choose(&mut rng).expect("palette non-empty");
        objects.push(Object {
            id: format!("{class}_1"),
            class_label: class.into(),
            attributes: vec![(*color).into()],
            location: Location::At(take_spot()),
        });
    }
    for (class, room) in household_classes(scene_id) {
        let inside: Vec<&Landmark> = landmarks.iter().filter(|l| l.receptacle && l.room_id == *room).collect();
        let host = inside
            .choose(&mut rng)
            .ok_or_else(|| SimError::Config(format!("room {room} has no receptacle for {class}")))?;
        let color = PALETTE.choose(&mut rng).expect("palette non-empty");
        objects.push(Object {
            id: format!("{class}_1"),
            class_label: (*class).into(),
            attributes: vec![(*color).into()],
            location: Location::Inside(host.id.clone()),
        });
    }

    let dock = dock(scene_id);
    let world = WorldState {
        scene_id,
        layout_seed,
        rooms,
        landmarks,
        objects,
        robot: Robot::docked(dock.clone()),
        dock,
        clock: 0,
    };
    world.validate()?;

    // Background life: each night two open-air objects get put elsewhere.
    let movable: Vec<String> = world
        .objects
        .iter()
        .filter(|o| matches!(o.location, Location::At(_)))
        .map(|o| o.id.clone())
        .collect();
    let mut schedule = Schedule::new(derive_seed(layout_seed, 0x5c4e_d01e));
    for day in 1..BACKGROUND_DAYS {
        for _ in 0..2 {
            let object = movable.choose(&mut rng).expect("movable objects exist");
            let to = surfaces.choose(&mut rng).expect("surfaces exist");
            schedule.push(ScheduledEvent::moving(day, 0, object, Location::At(to.clone())));
        }
    }
    Ok((world, schedule))
}
