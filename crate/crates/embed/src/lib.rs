//! Caption embedders.
//!
//! The reference embedder is a signed feature hash of word unigrams and
//! bigrams (FNV-1a, 64 bit) followed by L2 normalization. It has no model
//! weights and produces byte-identical vectors on every platform, which
//! keeps retrieval tests exact. The external embedder forwards text to a
//! remote endpoint for deployments that want learned embeddings.

pub mod transport;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

pub use transport::{send_with_retries, HttpTransport, Transport, TransportError};

pub const DEFAULT_DIM: usize = 256;
pub const MIN_DIM: usize = 8;
/// Version tag of the text normalization pipeline; stored in memory files.
pub const NORMALIZATION_VERSION: &str = "lower-strip-punct-ws/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbedError {
    #[error("text has no tokens after normalization")]
    ZeroInformation,
    #[error("invalid embedder config: {0}")]
    Config(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("bad embedding response: {0}")]
    Response(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedderKind {
    Reference,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalEndpoint {
    pub url: String,
    pub model: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default)]
    pub retries: u32,
    /// Name of the environment variable holding a bearer token, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
}

fn default_timeout_ms() -> u64 {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedderConfig {
    pub kind: EmbedderKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external: Option<ExternalEndpoint>,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        Self {
            kind: EmbedderKind::Reference,
            dim: DEFAULT_DIM,
            external: None,
        }
    }
}

impl EmbedderConfig {
    pub fn reference(dim: usize) -> Self {
        Self {
            kind: EmbedderKind::Reference,
            dim,
            external: None,
        }
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.dim < MIN_DIM {
            return Err(EmbedError::Config(format!("dimension {} is below {MIN_DIM}", self.dim)));
        }
        if self.kind == EmbedderKind::External && self.external.is_none() {
            return Err(EmbedError::Config("external embedder needs endpoint settings".into()));
        }
        Ok(())
    }

    /// Builds the configured embedder. External embedders talk HTTP.
    pub fn build(&self) -> Result<Arc<dyn Embedder>, EmbedError> {
        self.validate()?;
        match self.kind {
            EmbedderKind::Reference => Ok(Arc::new(ReferenceEmbedder::new(self.dim)?)),
            EmbedderKind::External => {
                let ep = self.external.clone().expect("validated");
                let bearer = ep.api_key_env.as_deref().and_then(|k| std::env::var(k).ok());
                let transport = HttpTransport::new(ep.url.clone(), Duration::from_millis(ep.timeout_ms), bearer);
                Ok(Arc::new(ExternalEmbedder::new(ep, self.dim, Box::new(transport))))
            }
        }
    }
}

pub trait Embedder: Send + Sync {
    /// Unit-norm embedding of `text`.
    fn embed(&self, text: &str) -> Result<Vec<f32>, EmbedError>;
    fn dim(&self) -> usize;
    /// Stable identifier recorded alongside stored embeddings.
    fn id(&self) -> String;
}

/// Lowercases, strips punctuation, and splits on whitespace.
pub fn normalize(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| !c.is_ascii_punctuation())
        .collect();
    cleaned.split_whitespace().map(str::to_string).collect()
}

const UNIGRAM_WEIGHT: f64 = 1.0;
// Bigrams add word-order signal; the lower weight keeps their bucket
// collisions from swamping unigram overlap.
const BIGRAM_WEIGHT: f64 = 0.5;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h = FNV_OFFSET;
    for p in parts {
        for &b in *p {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

#[derive(Debug, Clone)]
pub struct ReferenceEmbedder {
    dim: usize,
}

impl ReferenceEmbedder {
    pub fn new(dim: usize) -> Result<Self, EmbedError> {
        if dim < MIN_DIM {
            return Err(EmbedError::Config(format!("dimension {dim} is below {MIN_DIM}")));
        }
        Ok(Self { dim })
    }

    fn add_feature(&self, acc: &mut [f64], h: u64, weight: f64) {
        let bucket = (h % self.dim as u64) as usize;
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        acc[bucket] += sign * weight;
    }
}

impl Embedder for ReferenceEmbedder {
    fn embed(&self, text: &str) -> Result<Vec<f32>, EmbedError> {
        let tokens = normalize(text);
        if tokens.is_empty() {
            return Err(EmbedError::ZeroInformation);
        }
        let mut acc = vec![0.0f64; self.dim];
        for t in &tokens {
            self.add_feature(&mut acc, fnv1a(&[b"u\x1f", t.as_bytes()]), UNIGRAM_WEIGHT);
        }
        for w in tokens.windows(2) {
            self.add_feature(
                &mut acc,
                fnv1a(&[b"b\x1f", w[0].as_bytes(), b" ", w[1].as_bytes()]),
                BIGRAM_WEIGHT,
            );
        }
        l2_normalize(&acc).ok_or(EmbedError::ZeroInformation)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn id(&self) -> String {
        format!("reference-fnv1a-unibigram/2:d{}", self.dim)
    }
}

fn l2_normalize(v: &[f64]) -> Option<Vec<f32>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    Some(v.iter().map(|x| (x / norm) as f32).collect())
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    input: &'a str,
}

#[derive(Deserialize)]
struct EmbedResponse {
    vector: Vec<f64>,
}

/// Forwards text to a remote embedding service: request `{model, input}`,
/// response `{vector}`. The vector is L2-normalized locally.
pub struct ExternalEmbedder {
    endpoint: ExternalEndpoint,
    dim: usize,
    transport: Box<dyn Transport>,
}

impl ExternalEmbedder {
    pub fn new(endpoint: ExternalEndpoint, dim: usize, transport: Box<dyn Transport>) -> Self {
        Self {
            endpoint,
            dim,
            transport,
        }
    }
}

impl Embedder for ExternalEmbedder {
    fn embed(&self, text: &str) -> Result<Vec<f32>, EmbedError> {
        let joined = normalize(text).join(" ");
        if joined.is_empty() {
            return Err(EmbedError::ZeroInformation);
        }
        let body = serde_json::to_string(&EmbedRequest {
            model: &self.endpoint.model,
            input: &joined,
        })
        .expect("request serializes");
        let reply = send_with_retries(self.transport.as_ref(), &body, self.endpoint.retries)?;
        let parsed: EmbedResponse = serde_json::from_str(&reply).map_err(|e| EmbedError::Response(e.to_string()))?;
        if parsed.vector.len() != self.dim {
            return Err(EmbedError::Response(format!(
                "vector has dimension {} (expected {})",
                parsed.vector.len(),
                self.dim
            )));
        }
        l2_normalize(&parsed.vector).ok_or_else(|| EmbedError::Response("zero vector".into()))
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn id(&self) -> String {
        format!("external:{}:d{}", self.endpoint.model, self.dim)
    }
}

/// In-run memo table in front of another embedder. Captions repeat heavily
/// during patrols, so this saves most embedding calls during memory builds.
pub struct Memoized<E> {
    inner: E,
    table: Mutex<HashMap<String, Vec<f32>>>,
}

impl<E: Embedder> Memoized<E> {
    pub fn new(inner: E) -> Self {
        Self {
            inner,
            table: Mutex::new(HashMap::new()),
        }
    }
}

impl<E: Embedder> Embedder for Memoized<E> {
    fn embed(&self, text: &str) -> Result<Vec<f32>, EmbedError> {
        if let Some(v) = self.table.lock().get(text) {
            return Ok(v.clone());
        }
        let v = self.inner.embed(text)?;
        self.table.lock().insert(text.to_string(), v.clone());
        Ok(v)
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn id(&self) -> String {
        self.inner.id()
    }
}

impl Embedder for Arc<dyn Embedder> {
    fn embed(&self, text: &str) -> Result<Vec<f32>, EmbedError> {
        (**self).embed(text)
    }

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn id(&self) -> String {
        (**self).id()
    }
}

/// Cosine of two unit vectors, accumulated in f64 in index order.
pub fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ReferenceEmbedder {
        ReferenceEmbedder::new(DEFAULT_DIM).unwrap()
    }

    #[test]
    fn deterministic() {
        let e = reference();
        assert_eq!(e.embed("red mug").unwrap(), e.embed("red mug").unwrap());
    }

    #[test]
    fn unit_norm() {
        let e = reference();
        for text in ["red mug", "a green folder on the study desk; a lamp on the study desk", "x"] {
            let v = e.embed(text).unwrap();
            let n = v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() <= 1e-6, "norm {n}");
        }
    }

    #[test]
    fn overlap_ordering() {
        let e = reference();
        let q = e.embed("red mug").unwrap();
        let near = dot(&e.embed("red mug on the table").unwrap(), &q);
        let far = dot(&e.embed("blue sofa").unwrap(), &q);
        assert!(near > far, "{near} vs {far}");
    }

    #[test]
    fn normalization_strips_punctuation_and_case() {
        assert_eq!(normalize("A Green, folder; on the DESK!"), vec!["a", "green", "folder", "on", "the", "desk"]);
        let e = reference();
        assert_eq!(e.embed("Red mug.").unwrap(), e.embed("red mug").unwrap());
    }

    #[test]
    fn empty_text_is_zero_information() {
        let e = reference();
        assert_eq!(e.embed("").unwrap_err(), EmbedError::ZeroInformation);
        assert_eq!(e.embed(" ;;, ").unwrap_err(), EmbedError::ZeroInformation);
    }

    #[test]
    fn small_dimensions_rejected() {
        assert!(ReferenceEmbedder::new(4).is_err());
        assert!(EmbedderConfig::reference(7).validate().is_err());
        assert!(EmbedderConfig {
            kind: EmbedderKind::External,
            dim: 16,
            external: None
        }
        .validate()
        .is_err());
    }

    /// FNV-1a test vectors.
    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(&[b""]), 0xcbf29ce484222325);
        assert_eq!(fnv1a(&[b"a"]), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(&[b"foobar"]), 0x85944171f73967e8);
        assert_eq!(fnv1a(&[b"foo", b"bar"]), fnv1a(&[b"foobar"]));
    }

    struct Fixed(Result<String, TransportError>);
    impl Transport for Fixed {
        fn send(&self, _body: &str) -> Result<String, TransportError> {
            self.0.clone()
        }
    }

    fn endpoint() -> ExternalEndpoint {
        ExternalEndpoint {
            url: "http://localhost:0/embed".into(),
            model: "m".into(),
            timeout_ms: 10,
            retries: 2,
            api_key_env: None,
        }
    }

    #[test]
    fn external_normalizes_response() {
        let e = ExternalEmbedder::new(endpoint(), 8, Box::new(Fixed(Ok(r#"{"vector":[3,4,0,0,0,0,0,0]}"#.into()))));
        let v = e.embed("hello").unwrap();
        assert!((v[0] - 0.6).abs() < 1e-7 && (v[1] - 0.8).abs() < 1e-7);
    }

    #[test]
    fn external_transport_error_surfaces() {
        let err = TransportError::Unavailable("down".into());
        let e = ExternalEmbedder::new(endpoint(), 8, Box::new(Fixed(Err(err.clone()))));
        assert_eq!(e.embed("hello").unwrap_err(), EmbedError::Transport(err));
    }

    #[test]
    fn external_wrong_dimension_rejected() {
        let e = ExternalEmbedder::new(endpoint(), 8, Box::new(Fixed(Ok(r#"{"vector":[1,2]}"#.into()))));
        assert!(matches!(e.embed("hello"), Err(EmbedError::Response(_))));
    }
}
