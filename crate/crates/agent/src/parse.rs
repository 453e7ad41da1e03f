//! Instruction templates and evidence extraction shared by the scripted
//! policies.

use recall_core::{parse_caption, Containment, Outcome, Step};

use crate::tools::RegistrySchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeRef {
    /// Where the object is now.
    Now,
    /// Where it was `n` days before the task day.
    DaysAgo(u64),
    /// Where it is most often seen.
    Usually,
}

/// What an instruction asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetQuery {
    pub class: String,
    pub attributes: Vec<String>,
    /// Landmark label the instruction refers to, if any.
    pub place: Option<String>,
    pub time: TimeRef,
}

impl TargetQuery {
    pub fn object_phrase(&self) -> String {
        let mut words = self.attributes.clone();
        words.push(self.class.clone());
        words.join(" ")
    }

    pub fn matches(&self, class: &str, attributes: &[String]) -> bool {
        class == self.class && self.attributes.iter().all(|a| attributes.contains(a))
    }
}

pub const PREFIXES: [&str; 4] = ["find the ", "bring me the ", "fetch the ", "get the "];
const DAYS: [(&str, u64); 5] = [
    ("yesterday", 1),
    ("two days ago", 2),
    ("three days ago", 3),
    ("four days ago", 4),
    ("five days ago", 5),
];

pub fn days_phrase(n: u64) -> &'static str {
    DAYS.iter().find(|(_, d)| *d == n).map_or("yesterday", |(p, _)| p)
}

/// Parses the instruction templates used by the benchmark:
///
/// * `find the <attrs> <class>`
/// * `find the <class> on|in the <landmark>`
/// * `find the <class> that was on|in the <landmark> yesterday|two days ago|...`
/// * `find the <class> that is usually on|in the <landmark>`
pub fn parse_instruction(text: &str) -> Option<TargetQuery> {
    let lower = text.trim().trim_end_matches(['.', '!', '?']).to_lowercase();
    let rest = PREFIXES.iter().find_map(|p| lower.strip_prefix(p))?;

    let (object, place, time) = if let Some((obj, tail)) = rest.split_once(" that was ") {
        let (day_phrase, n) = DAYS.iter().find(|(p, _)| tail.ends_with(p))?;
        let place = strip_relation(tail.strip_suffix(day_phrase)?.trim_end())?;
        (obj, Some(place), TimeRef::DaysAgo(*n))
    } else if let Some((obj, tail)) = rest.split_once(" that is usually ") {
        (obj, Some(strip_relation(tail)?), TimeRef::Usually)
    } else if let Some((obj, place)) = rest.split_once(" on the ").or_else(|| rest.split_once(" in the ")) {
        (obj, Some(place.to_string()), TimeRef::Now)
    } else {
        (rest, None, TimeRef::Now)
    };
    let mut words: Vec<String> = object.split_whitespace().map(str::to_string).collect();
    let class = words.pop()?;
    Some(TargetQuery {
        class,
        attributes: words,
        place: place.filter(|p| !p.is_empty()),
        time,
    })
}

fn strip_relation(s: &str) -> Option<String> {
    s.strip_prefix("on the ")
        .or_else(|| s.strip_prefix("in the "))
        .map(|p| p.trim().to_string())
}

/// One remembered or perceived appearance of an entity.
#[derive(Debug, Clone, PartialEq)]
pub struct Sighting {
    pub record_index: usize,
    pub t: u64,
    pub day: u64,
    pub class: String,
    pub attributes: Vec<String>,
    pub landmark_label: String,
    /// Exact landmark id when known (raw observations), else `None`.
    pub landmark_id: Option<String>,
    pub contained: bool,
    pub room: String,
    pub position: [f64; 2],
}

/// All sightings carried by retrieval outcomes in the trace, deduplicated
/// per (record, class, attributes, landmark) and sorted by time.
pub fn memory_sightings(steps: &[Step]) -> Vec<Sighting> {
    let mut out: Vec<Sighting> = Vec::new();
    let mut raw: Vec<(usize, Vec<recall_core::EntityView>)> = Vec::new();
    for step in steps {
        match &step.outcome {
            Outcome::Retrieval { hits } => {
                for h in hits {
                    for seg in parse_caption(&h.caption) {
                        out.push(Sighting {
                            record_index: h.index,
                            t: h.t.value,
                            day: h.t.day,
                            class: seg.class_label,
                            attributes: seg.attributes,
                            landmark_label: seg.landmark_label,
                            landmark_id: None,
                            contained: seg.containment == Containment::InsideOpenReceptacle,
                            room: h.pose.room_id.clone(),
                            position: h.pose.position,
                        });
                    }
                }
            }
            Outcome::RawObservation {
                record_index,
                observation,
            } => raw.push((*record_index, observation.visible_entities.clone())),
            _ => {}
        }
    }
    // Raw observations pin down exact landmark ids for their record.
    for (index, entities) in raw {
        for s in out.iter_mut().filter(|s| s.record_index == index) {
            if let Some(e) = entities.iter().find(|e| {
                e.class_label == s.class
                    && e.attributes == s.attributes
                    && (e.containment == Containment::InsideOpenReceptacle) == s.contained
            }) {
                s.landmark_id = Some(e.landmark_id.clone());
            }
        }
    }
    out.sort_by(|a, b| {
        (a.t, &a.class, &a.attributes, &a.landmark_label).cmp(&(b.t, &b.class, &b.attributes, &b.landmark_label))
    });
    out.dedup_by(|a, b| {
        a.record_index == b.record_index
            && a.class == b.class
            && a.attributes == b.attributes
            && a.landmark_label == b.landmark_label
            && a.contained == b.contained
    });
    out
}

/// Resolves a sighting to a landmark id: exact id if known, else the
/// unique landmark with that label in the sighting's room, else the
/// labeled landmark nearest to where the robot stood.
pub fn resolve_landmark(schema: &RegistrySchema, s: &Sighting) -> Option<String> {
    if let Some(id) = &s.landmark_id {
        return Some(id.clone());
    }
    let candidates: Vec<_> = schema.landmarks_labeled(&s.landmark_label, Some(&s.room)).collect();
    match candidates.len() {
        0 => None,
        1 => Some(candidates[0].id.clone()),
        _ => candidates
            .into_iter()
            .min_by(|a, b| {
                recall_core::euclidean(a.approach, s.position).total_cmp(&recall_core::euclidean(b.approach, s.position))
            })
            .map(|l| l.id.clone()),
    }
}

/// Entities from the most recent detect in the trace, if the last spatial
/// step was a detect.
pub fn last_detection(steps: &[Step]) -> Option<&[recall_core::EntityView]> {
    steps.iter().rev().find_map(|s| match &s.outcome {
        Outcome::Perception { detection } => Some(detection.entities.as_slice()),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_parse() {
        let q = parse_instruction("Find the green folder.").unwrap();
        assert_eq!((q.class.as_str(), q.attributes.clone(), q.place.clone(), q.time), ("folder", vec!["green".to_string()], None, TimeRef::Now));
        let q = parse_instruction("find the mug on the kitchen counter").unwrap();
        assert_eq!((q.class.as_str(), q.place.as_deref(), q.time), ("mug", Some("kitchen counter"), TimeRef::Now));
        let q = parse_instruction("find the book that was on the study desk yesterday").unwrap();
        assert_eq!((q.class.as_str(), q.place.as_deref(), q.time), ("book", Some("study desk"), TimeRef::DaysAgo(1)));
        let q = parse_instruction("find the toy that was on the bed three days ago").unwrap();
        assert_eq!(q.time, TimeRef::DaysAgo(3));
        let q = parse_instruction("find the mug that is usually on the sink").unwrap();
        assert_eq!((q.place.as_deref(), q.time), (Some("sink"), TimeRef::Usually));
        let q = parse_instruction("find the mug in the cabinet").unwrap();
        assert_eq!(q.place.as_deref(), Some("cabinet"));
        assert!(parse_instruction("dance").is_none());
    }
}
