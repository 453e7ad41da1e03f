//! Pieces shared by the scripted policies.

use std::collections::BTreeMap;

use recall_core::{Action, EntityView};

use crate::parse::{resolve_landmark, Sighting, TargetQuery, TimeRef};
use crate::tools::{RegistrySchema, DETECT, NAVIGATE, OPEN, PICK};

/// The concrete object a policy will look for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    pub class: String,
    pub attributes: Vec<String>,
}

impl Descriptor {
    pub fn matches(&self, class: &str, attributes: &[String]) -> bool {
        class == self.class && self.attributes.iter().all(|a| attributes.contains(a))
    }

    pub fn phrase(&self) -> String {
        let mut w = self.attributes.clone();
        w.push(self.class.clone());
        w.join(" ")
    }
}

/// Turns the instruction into a descriptor using remembered sightings:
/// for "was on X n days ago" and "usually on X" the attributes of the
/// object seen at X decide which instance is meant.
pub fn resolve_descriptor(q: &TargetQuery, sightings: &[Sighting], current_day: u64) -> Descriptor {
    let base = Descriptor {
        class: q.class.clone(),
        attributes: q.attributes.clone(),
    };
    let Some(place) = &q.place else { return base };
    let at_place = sightings
        .iter()
        .filter(|s| q.matches(&s.class, &s.attributes) && &s.landmark_label == place);
    // attrs -> (distinct days, latest t, count)
    let mut tally: BTreeMap<Vec<String>, (std::collections::BTreeSet<u64>, u64, usize)> = BTreeMap::new();
    for s in at_place {
        if let TimeRef::DaysAgo(n) = q.time {
            if s.day + n != current_day {
                continue;
            }
        }
        let e = tally.entry(s.attributes.clone()).or_default();
        e.0.insert(s.day);
        e.1 = e.1.max(s.t);
        e.2 += 1;
    }
    let best = match q.time {
        TimeRef::Usually => tally.into_iter().max_by_key(|(_, (days, t, n))| (days.len(), *n, *t)),
        _ => tally.into_iter().max_by_key(|(_, (_, t, n))| (*t, *n)),
    };
    match best {
        Some((attributes, _)) => Descriptor {
            class: q.class.clone(),
            attributes,
        },
        None => base,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    pub landmark: String,
    pub contained: bool,
    /// Tick of the supporting sighting (0 for prior-table guesses).
    pub t: u64,
    /// Record holding the latest supporting sighting.
    pub record_index: Option<usize>,
}

/// Candidate landmarks for the descriptor, newest sighting first. With a
/// present-tense place ("the mug on the sink") only sightings at that
/// place count.
pub fn rank_hypotheses(
    q: &TargetQuery,
    d: &Descriptor,
    sightings: &[Sighting],
    schema: &RegistrySchema,
) -> Vec<Hypothesis> {
    let mut latest: BTreeMap<String, Hypothesis> = BTreeMap::new();
    for s in sightings {
        if !d.matches(&s.class, &s.attributes) {
            continue;
        }
        if q.time == TimeRef::Now && q.place.as_ref().is_some_and(|p| p != &s.landmark_label) {
            continue;
        }
        let Some(landmark) = resolve_landmark(schema, s) else { continue };
        let h = Hypothesis {
            landmark: landmark.clone(),
            contained: s.contained,
            t: s.t,
            record_index: Some(s.record_index),
        };
        match latest.get(&landmark) {
            Some(prev) if prev.t >= s.t => {}
            _ => {
                latest.insert(landmark, h);
            }
        }
    }
    let mut v: Vec<Hypothesis> = latest.into_values().collect();
    v.sort_by(|a, b| b.t.cmp(&a.t).then(a.landmark.cmp(&b.landmark)));
    v
}

/// Best entity in a detection for the descriptor: matching entities at the
/// expected landmark first, then any match.
pub fn choose_entity<'a>(
    entities: &'a [EntityView],
    d: &Descriptor,
    expected_landmark: Option<&str>,
    exclude: &[String],
) -> Option<&'a EntityView> {
    let ok = |e: &&EntityView| d.matches(&e.class_label, &e.attributes) && !exclude.contains(&e.entity_id);
    entities
        .iter()
        .filter(ok)
        .find(|e| Some(e.landmark_id.as_str()) == expected_landmark)
        .or_else(|| entities.iter().find(ok))
}

pub fn navigate(landmark: &str) -> Action {
    Action::new(NAVIGATE).arg("landmark", landmark)
}

pub fn detect() -> Action {
    Action::new(DETECT)
}

pub fn open(receptacle: &str) -> Action {
    Action::new(OPEN).arg("receptacle", receptacle)
}

pub fn pick(entity: &str) -> Action {
    Action::new(PICK).arg("entity", entity)
}
