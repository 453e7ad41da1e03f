//! Long-term memory: an append-only log of patrol records with three
//! exact-scan indices.
//!
//! * semantic: cosine similarity between a query embedding and the stored
//!   caption embeddings (embeddings are unit norm, so this is a dot product)
//! * temporal: absolute tick distance to a point, or a day window ordered by
//!   recency
//! * spatial: Euclidean distance of the recorded robot position to a point
//!
//! All queries scan every record. Ties are broken by lower record index.

mod persist;
mod shared;

use std::cmp::Ordering;

use recall_core::{derive_seed, render_caption, Frame, MemoryMode, MemoryRecord, NoiseModel, SymbolicObservation, Timestep};
use recall_embed::{EmbedError, Embedder, NORMALIZATION_VERSION};
use serde::{Deserialize, Serialize};

pub use persist::{load, persist, read_from, write_to, FORMAT_NAME, FORMAT_VERSION};
pub use shared::SharedMemory;

pub const DEFAULT_SNAPSHOT_EVERY: u64 = 25;
/// Result count used when a caller does not name one.
pub const DEFAULT_R: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum MemError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("timestamp {next} does not follow {prev}")]
    NonMonotonic { prev: u64, next: u64 },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("embedder produced dimension {got}, memory expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("integrity error at record {record}: {reason}")]
    Integrity { record: usize, reason: String },
    #[error("bad memory file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Settings fixed at construction and stored in the file header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryMeta {
    pub dim: usize,
    pub ticks_per_day: u64,
    pub snapshot_every: u64,
    pub embedder: String,
    pub normalization: String,
    pub mode: MemoryMode,
    /// Seed of the caption noise stream (only meaningful in realistic mode).
    pub noise_seed: u64,
    /// Hash of the producing pipeline config, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl MemoryMeta {
    pub fn new(embedder: &dyn Embedder, ticks_per_day: u64, mode: MemoryMode) -> Self {
        Self {
            dim: embedder.dim(),
            ticks_per_day,
            snapshot_every: DEFAULT_SNAPSHOT_EVERY,
            embedder: embedder.id(),
            normalization: NORMALIZATION_VERSION.to_string(),
            mode,
            noise_seed: 0,
            config_hash: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub index: usize,
    pub score: f64,
}

/// Top-r answer of one query: hits in rank order plus the matching records.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub hits: Vec<Hit>,
    pub records: Vec<MemoryRecord>,
}

impl QueryResult {
    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.hits.iter().map(|h| h.index).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemporalQuery {
    /// Nearest ticks to `t`; score is the tick distance.
    Point(u64),
    /// Every record whose day lies in `[day_start, day_end]`, newest first;
    /// score is the record's tick.
    Window { day_start: u64, day_end: u64 },
}

#[derive(Debug, Clone)]
pub struct LongTermMemory {
    meta: MemoryMeta,
    noise: NoiseModel,
    records: Vec<MemoryRecord>,
    semantic: Vec<f32>,
    temporal: Vec<u64>,
    spatial: Vec<[f64; 2]>,
}

impl LongTermMemory {
    pub fn empty(meta: MemoryMeta) -> Self {
        Self {
            meta,
            noise: NoiseModel::default(),
            records: Vec::new(),
            semantic: Vec::new(),
            temporal: Vec::new(),
            spatial: Vec::new(),
        }
    }

    /// Builds memory from a patrol stream. Construction never sees a task:
    /// every frame is captioned under `meta.mode`, embedded and appended.
    pub fn build<'a, I>(frames: I, embedder: &dyn Embedder, meta: MemoryMeta, noise: NoiseModel) -> Result<Self, MemError>
    where
        I: IntoIterator<Item = &'a Frame>,
    {
        if meta.dim != embedder.dim() {
            return Err(MemError::Dimension {
                expected: meta.dim,
                got: embedder.dim(),
            });
        }
        if meta.ticks_per_day == 0 || meta.snapshot_every == 0 {
            return Err(MemError::InvalidArgument("ticks_per_day and snapshot_every must be positive".into()));
        }
        let mut m = Self::empty(meta);
        m.noise = noise;
        for f in frames {
            m.append_frame(f, embedder)?;
        }
        Ok(m)
    }

    /// Captions, embeds and appends one frame.
    pub fn append_frame(&mut self, frame: &Frame, embedder: &dyn Embedder) -> Result<(), MemError> {
        self.check_next(frame.t)?;
        let seed = derive_seed(self.meta.noise_seed, frame.t.value);
        let caption = render_caption(&frame.observation.visible_entities, self.meta.mode, seed, &self.noise);
        let raw = SymbolicObservation {
            visible_entities: frame.observation.visible_entities.clone(),
            caption,
            keyframe: frame.t.value % self.meta.snapshot_every == 0,
        };
        let embedding = embedder.embed(&raw.caption)?;
        self.push(MemoryRecord {
            t: frame.t,
            pose: frame.pose.clone(),
            embedding,
            raw,
        })
    }

    /// Appends an already-embedded record.
    pub fn push(&mut self, record: MemoryRecord) -> Result<(), MemError> {
        self.check_next(record.t)?;
        if record.embedding.len() != self.meta.dim {
            return Err(MemError::Dimension {
                expected: self.meta.dim,
                got: record.embedding.len(),
            });
        }
        self.semantic.extend_from_slice(&record.embedding);
        self.temporal.push(record.t.value);
        self.spatial.push(record.pose.position);
        self.records.push(record);
        Ok(())
    }

    fn check_next(&self, t: Timestep) -> Result<(), MemError> {
        if t.day != t.value / self.meta.ticks_per_day {
            return Err(MemError::InvalidArgument(format!(
                "timestep {} has day {} under {} ticks/day",
                t.value, t.day, self.meta.ticks_per_day
            )));
        }
        match self.temporal.last() {
            Some(&prev) if t.value <= prev => Err(MemError::NonMonotonic { prev, next: t.value }),
            _ => Ok(()),
        }
    }

    pub fn meta(&self) -> &MemoryMeta {
        &self.meta
    }

    pub fn set_config_hash(&mut self, hash: Option<String>) {
        self.meta.config_hash = hash;
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[MemoryRecord] {
        &self.records
    }

    pub fn record(&self, index: usize) -> Option<&MemoryRecord> {
        self.records.get(index)
    }

    /// Day of the latest record, if any.
    pub fn last_day(&self) -> Option<u64> {
        self.records.last().map(|r| r.t.day)
    }

    pub fn embedding(&self, index: usize) -> &[f32] {
        let d = self.meta.dim;
        &self.semantic[index * d..(index + 1) * d]
    }

    /// Index lengths as (records, semantic rows, temporal, spatial).
    pub fn index_lengths(&self) -> (usize, usize, usize, usize) {
        (
            self.records.len(),
            self.semantic.len() / self.meta.dim.max(1),
            self.temporal.len(),
            self.spatial.len(),
        )
    }

    pub fn query_semantic(&self, embedder: &dyn Embedder, q: &str, r: usize) -> Result<QueryResult, MemError> {
        check_r(r)?;
        if self.is_empty() {
            return Ok(self.result(Vec::new()));
        }
        let v = embedder.embed(q)?;
        self.query_semantic_vec(&v, r)
    }

    /// Top-r by cosine against a unit query vector.
    pub fn query_semantic_vec(&self, q: &[f32], r: usize) -> Result<QueryResult, MemError> {
        check_r(r)?;
        if q.len() != self.meta.dim {
            return Err(MemError::Dimension {
                expected: self.meta.dim,
                got: q.len(),
            });
        }
        let hits: Vec<Hit> = (0..self.len())
            .map(|i| Hit {
                index: i,
                score: recall_embed::dot(q, self.embedding(i)),
            })
            .collect();
        Ok(self.result(top_r(hits, r, Rank::Descending)))
    }

    pub fn query_temporal(&self, q: TemporalQuery, r: usize) -> Result<QueryResult, MemError> {
        check_r(r)?;
        let hits = match q {
            TemporalQuery::Point(center) => {
                let hits = self
                    .temporal
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| Hit {
                        index: i,
                        score: t.abs_diff(center) as f64,
                    })
                    .collect();
                // Timestamps increase with index, so index order is time order.
                top_r(hits, r, Rank::Ascending)
            }
            TemporalQuery::Window { day_start, day_end } => {
                if day_start > day_end {
                    return Err(MemError::InvalidArgument(format!(
                        "day window [{day_start}, {day_end}] is empty"
                    )));
                }
                let tpd = self.meta.ticks_per_day;
                let lo = self.temporal.partition_point(|&t| t / tpd < day_start);
                let hi = self.temporal.partition_point(|&t| t / tpd <= day_end);
                (lo..hi)
                    .rev()
                    .take(r)
                    .map(|i| Hit {
                        index: i,
                        score: self.temporal[i] as f64,
                    })
                    .collect()
            }
        };
        Ok(self.result(hits))
    }

    pub fn query_spatial(&self, center: [f64; 2], radius: f64, r: usize) -> Result<QueryResult, MemError> {
        check_r(r)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(MemError::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        let hits = self
            .spatial
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let d = recall_core::euclidean(*p, center);
                (d <= radius).then_some(Hit { index: i, score: d })
            })
            .collect();
        Ok(self.result(top_r(hits, r, Rank::Ascending)))
    }

    pub fn fetch_raw(&self, index: usize) -> Result<&SymbolicObservation, MemError> {
        self.records.get(index).map(|r| &r.raw).ok_or_else(|| {
            MemError::InvalidArgument(format!("record index {index} out of range (len {})", self.len()))
        })
    }

    fn result(&self, hits: Vec<Hit>) -> QueryResult {
        let records = hits.iter().map(|h| self.records[h.index].clone()).collect();
        QueryResult { hits, records }
    }
}

fn check_r(r: usize) -> Result<(), MemError> {
    if r == 0 {
        return Err(MemError::InvalidArgument("r must be at least 1".into()));
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Rank {
    Descending,
    Ascending,
}

fn top_r(mut hits: Vec<Hit>, r: usize, rank: Rank) -> Vec<Hit> {
    let cmp = |a: &Hit, b: &Hit| -> Ordering {
        let by_score = match rank {
            Rank::Descending => b.score.total_cmp(&a.score),
            Rank::Ascending => a.score.total_cmp(&b.score),
        };
        by_score.then(a.index.cmp(&b.index))
    };
    if hits.len() > r {
        hits.select_nth_unstable_by(r - 1, cmp);
        hits.truncate(r);
    }
    hits.sort_unstable_by(cmp);
    hits
}

#[cfg(test)]
mod tests {
    use recall_core::{Containment, EntityView, Pose};
    use recall_embed::ReferenceEmbedder;

    use super::*;

    fn ent(id: &str, class: &str, attr: &str, lm: &str) -> EntityView {
        EntityView {
            entity_id: id.into(),
            class_label: class.into(),
            attributes: vec![attr.into()],
            landmark_id: lm.into(),
            containment: Containment::OpenAir,
        }
    }

    fn frames(n: u64, tpd: u64) -> Vec<Frame> {
        (0..n)
            .map(|t| {
                let entities = match t % 4 {
                    0 => vec![ent("mug_1", "mug", "red", "sink")],
                    1 => vec![ent("book_1", "book", "blue", "bed")],
                    2 => vec![],
                    _ => vec![ent("toy_1", "toy", "small", "sofa")],
                };
                Frame {
                    t: Timestep::new(t, tpd),
                    pose: Pose::new(t as f64 * 0.1, 0.0, 0.0, "kitchen"),
                    observation: SymbolicObservation::oracle(entities).unwrap(),
                }
            })
            .collect()
    }

    fn memory(n: u64, tpd: u64) -> (LongTermMemory, ReferenceEmbedder) {
        let e = ReferenceEmbedder::new(64).unwrap();
        let meta = MemoryMeta::new(&e, tpd, MemoryMode::Oracle);
        let m = LongTermMemory::build(&frames(n, tpd), &e, meta, NoiseModel::default()).unwrap();
        (m, e)
    }

    #[test]
    fn build_keeps_indices_aligned() {
        let (m, _) = memory(0, 200);
        assert_eq!(m.index_lengths(), (0, 0, 0, 0));
        let (m, _) = memory(10, 200);
        assert_eq!(m.index_lengths(), (10, 10, 10, 10));
        let (m, _) = memory(600, 200);
        assert_eq!(m.len(), 600);
        assert_eq!(m.last_day(), Some(2));
    }

    #[test]
    fn non_monotonic_stream_is_rejected() {
        let e = ReferenceEmbedder::new(64).unwrap();
        let mut fs = frames(3, 200);
        fs.swap(1, 2);
        let meta = MemoryMeta::new(&e, 200, MemoryMode::Oracle);
        let err = LongTermMemory::build(&fs, &e, meta, NoiseModel::default()).unwrap_err();
        assert!(matches!(err, MemError::NonMonotonic { prev: 2, next: 1 }));
    }

    #[test]
    fn semantic_exact_caption_scores_one() {
        let (m, e) = memory(12, 200);
        let q = m.records()[1].raw.caption.clone();
        let res = m.query_semantic(&e, &q, 1).unwrap();
        assert_eq!(res.hits[0].index, 1);
        assert!((res.hits[0].score - 1.0).abs() < 1e-6);
        assert_eq!(res.records[0], m.records()[1]);
    }

    #[test]
    fn semantic_on_empty_memory_is_empty() {
        let (m, e) = memory(0, 200);
        assert!(m.query_semantic(&e, "anything", 5).unwrap().is_empty());
    }

    #[test]
    fn temporal_point_breaks_ties_toward_earlier() {
        let (m, _) = memory(10, 200);
        let res = m.query_temporal(TemporalQuery::Point(5), 3).unwrap();
        assert_eq!(res.indices(), vec![5, 4, 6]);
        let res = m.query_temporal(TemporalQuery::Point(7), 1).unwrap();
        assert_eq!(res.indices(), vec![7]);
    }

    #[test]
    fn temporal_window_selects_one_day() {
        let (m, _) = memory(600, 200);
        let res = m
            .query_temporal(
                TemporalQuery::Window {
                    day_start: 1,
                    day_end: 1,
                },
                1000,
            )
            .unwrap();
        assert_eq!(res.hits.len(), 200);
        assert_eq!(res.hits[0].index, 399);
        assert!(res.indices().iter().all(|&i| (200..400).contains(&i)));
        let err = m.query_temporal(
            TemporalQuery::Window {
                day_start: 2,
                day_end: 1,
            },
            5,
        );
        assert!(matches!(err, Err(MemError::InvalidArgument(_))));
    }

    #[test]
    fn spatial_radius_and_order() {
        let (m, _) = memory(10, 200);
        let res = m.query_spatial([0.3, 0.0], 0.01, 5).unwrap();
        assert_eq!(res.indices(), vec![3]);
        let res = m.query_spatial([100.0, 0.0], 1.0, 5).unwrap();
        assert!(res.is_empty());
        assert!(m.query_spatial([0.0, 0.0], 0.0, 5).is_err());
    }

    #[test]
    fn fetch_raw_bounds_and_keyframes() {
        let (m, _) = memory(60, 200);
        assert_eq!(m.fetch_raw(1).unwrap().visible_entities[0].entity_id, "book_1");
        assert!(matches!(m.fetch_raw(60), Err(MemError::InvalidArgument(_))));
        let raw = m.fetch_raw(25).unwrap();
        assert!(raw.keyframe);
        assert_eq!(raw.visible_entities.len(), 1);
        assert!(!m.fetch_raw(26).unwrap().keyframe);
    }

    #[test]
    fn zero_r_is_invalid() {
        let (m, _) = memory(4, 200);
        assert!(m.query_temporal(TemporalQuery::Point(0), 0).is_err());
    }
}
