//! Template captions for symbolic observations.
//!
//! A caption is a `"; "`-joined list of segments, one per entity:
//! `a <attributes> <class> on the <landmark>` for open-air entities and
//! `a <attributes> <class> in the open <landmark>` for entities inside an
//! open receptacle. An empty view renders as [`NOTHING_NOTABLE`].
//!
//! Landmark labels are derived from landmark ids: a trailing `_<digits>`
//! suffix is dropped and underscores become spaces, so `cabinet_1` and
//! `cabinet_2` both read as "cabinet".

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::observation::{Containment, EntityView};

pub const NOTHING_NOTABLE: &str = "nothing notable";
const SEGMENT_SEP: &str = "; ";
const ON_THE: &str = " on the ";
const IN_THE_OPEN: &str = " in the open ";

/// How captions (and therefore the semantic index) are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryMode {
    Oracle,
    Realistic,
}

impl MemoryMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MemoryMode::Oracle => "oracle",
            MemoryMode::Realistic => "realistic",
        }
    }
}

impl std::str::FromStr for MemoryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(MemoryMode::Oracle),
            "realistic" => Ok(MemoryMode::Realistic),
            other => Err(format!("unknown mode {other:?} (expected oracle|realistic)")),
        }
    }
}

impl std::fmt::Display for MemoryMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Caption noise applied in realistic mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Probability that an entity's class label is replaced by another
    /// label from `vocabulary`.
    pub p_mislabel: f64,
    /// Probability that an entity is omitted from the caption.
    pub p_drop: f64,
    pub vocabulary: Vec<String>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p_mislabel: 0.15,
            p_drop: 0.10,
            vocabulary: [
                "mug", "folder", "book", "toy", "remote", "laptop", "plant", "vase", "bottle",
                "cup", "box", "bag",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        }
    }
}

/// Human-readable label for a landmark id.
pub fn landmark_label(landmark_id: &str) -> String {
    let base = match landmark_id.rsplit_once('_') {
        Some((head, tail)) if !head.is_empty() && !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) => head,
        _ => landmark_id,
    };
    base.replace('_', " ")
}

fn segment(attributes: &[String], class_label: &str, landmark_id: &str, containment: Containment) -> String {
    let mut s = String::from("a ");
    for a in attributes {
        s.push_str(a);
        s.push(' ');
    }
    s.push_str(class_label);
    s.push_str(match containment {
        Containment::OpenAir => ON_THE,
        Containment::InsideOpenReceptacle => IN_THE_OPEN,
    });
    s.push_str(&landmark_label(landmark_id));
    s
}

/// Renders the caption for a list of visible entities.
///
/// Oracle mode is a pure template. Realistic mode draws three uniforms per
/// entity from a ChaCha8 stream seeded with `seed` (drop, mislabel, and
/// substitute choice), so captions are reproducible across platforms.
pub fn render_caption(entities: &[EntityView], mode: MemoryMode, seed: u64, noise: &NoiseModel) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::with_capacity(entities.len());
    for e in entities {
        let mut class_label = e.class_label.as_str();
        if mode == MemoryMode::Realistic {
            let u_drop: f64 = rng.gen();
            let u_mislabel: f64 = rng.gen();
            let u_pick: f64 = rng.gen();
            if u_drop < noise.p_drop {
                continue;
            }
            if u_mislabel < noise.p_mislabel {
                let others: Vec<&String> = noise.vocabulary.iter().filter(|v| **v != e.class_label).collect();
                if !others.is_empty() {
                    let idx = ((u_pick * others.len() as f64) as usize).min(others.len() - 1);
                    class_label = others[idx].as_str();
                }
            }
        }
        parts.push(segment(&e.attributes, class_label, &e.landmark_id, e.containment));
    }
    if parts.is_empty() {
        NOTHING_NOTABLE.to_string()
    } else {
        parts.join(SEGMENT_SEP)
    }
}

/// One parsed caption segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptionSegment {
    pub attributes: Vec<String>,
    pub class_label: String,
    pub landmark_label: String,
    pub containment: Containment,
}

impl CaptionSegment {
    pub fn matches(&self, class_label: &str, attributes: &[String]) -> bool {
        self.class_label == class_label && attributes.iter().all(|a| self.attributes.contains(a))
    }
}

/// Inverse of the caption template. Segments that do not follow the
/// template are skipped.
pub fn parse_caption(caption: &str) -> Vec<CaptionSegment> {
    if caption == NOTHING_NOTABLE {
        return Vec::new();
    }
    caption
        .split(SEGMENT_SEP)
        .filter_map(|seg| {
            let rest = seg.strip_prefix("a ")?;
            let (noun, place, containment) = if let Some((n, p)) = rest.split_once(IN_THE_OPEN) {
                (n, p, Containment::InsideOpenReceptacle)
            } else {
                let (n, p) = rest.split_once(ON_THE)?;
                (n, p, Containment::OpenAir)
            };
            let mut words: Vec<String> = noun.split_whitespace().map(str::to_string).collect();
            let class_label = words.pop()?;
            Some(CaptionSegment {
                attributes: words,
                class_label,
                landmark_label: place.to_string(),
                containment,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ent(id: &str, class: &str, attrs: &[&str], lm: &str, c: Containment) -> EntityView {
        EntityView {
            entity_id: id.into(),
            class_label: class.into(),
            attributes: attrs.iter().map(|s| s.to_string()).collect(),
            landmark_id: lm.into(),
            containment: c,
        }
    }

    #[test]
    fn oracle_template() {
        let e = vec![ent("folder_1", "folder", &["green"], "study_desk", Containment::OpenAir)];
        assert_eq!(
            render_caption(&e, MemoryMode::Oracle, 99, &NoiseModel::default()),
            "a green folder on the study desk"
        );
        let two = vec![
            ent("folder_1", "folder", &["green"], "study_desk", Containment::OpenAir),
            ent("lamp_1", "lamp", &[], "study_desk", Containment::OpenAir),
        ];
        assert_eq!(
            render_caption(&two, MemoryMode::Oracle, 0, &NoiseModel::default()),
            "a green folder on the study desk; a lamp on the study desk"
        );
    }

    #[test]
    fn empty_is_nothing_notable() {
        assert_eq!(render_caption(&[], MemoryMode::Oracle, 3, &NoiseModel::default()), NOTHING_NOTABLE);
        assert_eq!(render_caption(&[], MemoryMode::Realistic, 3, &NoiseModel::default()), NOTHING_NOTABLE);
    }

    #[test]
    fn forced_drop_empties_caption() {
        let noise = NoiseModel { p_drop: 1.0, ..NoiseModel::default() };
        let e = vec![ent("mug_1", "mug", &["red"], "sink", Containment::OpenAir)];
        assert_eq!(render_caption(&e, MemoryMode::Realistic, 7, &noise), NOTHING_NOTABLE);
    }

    #[test]
    fn forced_mislabel_never_keeps_true_class() {
        let noise = NoiseModel { p_drop: 0.0, p_mislabel: 1.0, ..NoiseModel::default() };
        let e = vec![ent("mug_1", "mug", &["red"], "sink", Containment::OpenAir)];
        for seed in 0..50 {
            let c = render_caption(&e, MemoryMode::Realistic, seed, &noise);
            let segs = parse_caption(&c);
            assert_eq!(segs.len(), 1);
            assert_ne!(segs[0].class_label, "mug");
            assert!(noise.vocabulary.contains(&segs[0].class_label));
        }
    }

    #[test]
    fn realistic_is_seed_deterministic() {
        let e = vec![
            ent("mug_1", "mug", &["red"], "sink", Containment::OpenAir),
            ent("book_1", "book", &["blue"], "sink", Containment::OpenAir),
            ent("toy_1", "toy", &["green"], "sink", Containment::OpenAir),
        ];
        let noise = NoiseModel { p_drop: 0.4, p_mislabel: 0.4, ..NoiseModel::default() };
        for seed in 0..20 {
            assert_eq!(
                render_caption(&e, MemoryMode::Realistic, seed, &noise),
                render_caption(&e, MemoryMode::Realistic, seed, &noise)
            );
        }
    }

    #[test]
    fn labels_drop_numeric_suffix() {
        assert_eq!(landmark_label("cabinet_2"), "cabinet");
        assert_eq!(landmark_label("study_desk"), "study desk");
        assert_eq!(landmark_label("sink"), "sink");
        assert_eq!(landmark_label("tv_stand"), "tv stand");
    }

    #[test]
    fn parse_inverts_template() {
        let e = vec![
            ent("mug_1", "mug", &["red"], "cabinet_1", Containment::InsideOpenReceptacle),
            ent("book_1", "book", &["small", "blue"], "coffee_table", Containment::OpenAir),
        ];
        let c = render_caption(&e, MemoryMode::Oracle, 0, &NoiseModel::default());
        let segs = parse_caption(&c);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].class_label, "mug");
        assert_eq!(segs[0].landmark_label, "cabinet");
        assert_eq!(segs[0].containment, Containment::InsideOpenReceptacle);
        assert_eq!(segs[1].attributes, vec!["small".to_string(), "blue".to_string()]);
        assert_eq!(segs[1].landmark_label, "coffee table");
        assert!(parse_caption(NOTHING_NOTABLE).is_empty());
    }
}
