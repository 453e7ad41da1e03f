//! Replays the policy wire fixture corpus: each case feeds canned replies
//! to an [`ExternalPolicy`] through a scripted transport and checks the
//! exact request bytes and the resulting decision.

use std::collections::VecDeque;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use recall_core::Step;
use recall_embed::{Transport, TransportError};
use serde::Deserialize;

use crate::policy::{ChatAdapter, ExternalPolicy, PlainAdapter, Policy, PolicyContext, PolicyDecision, WireAdapter};
use crate::tools::{standard_registry, LandmarkInfo, MemoryInfo, RegistrySchema};

/// Directory holding the shipped corpus.
pub fn default_fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/policy_wire")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdapterSpec {
    Plain,
    Chat { model: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CannedReply {
    Body { body: String },
    Error { error: String },
}

#[derive(Debug, Clone, Deserialize)]
pub struct WireCase {
    pub description: String,
    pub adapter: AdapterSpec,
    pub retries: u32,
    pub instruction: String,
    pub remaining_budget: u32,
    pub landmarks: Vec<LandmarkInfo>,
    pub memory: Option<MemoryInfo>,
    pub trace: Vec<Step>,
    pub replies: Vec<CannedReply>,
    pub expected: PolicyDecision,
}

/// Transport that answers from a fixed script and records every body.
#[derive(Default)]
pub struct ScriptedTransport {
    replies: Mutex<VecDeque<CannedReply>>,
    sent: Mutex<Vec<String>>,
}

impl ScriptedTransport {
    pub fn new(replies: Vec<CannedReply>) -> Self {
        Self {
            replies: Mutex::new(replies.into()),
            sent: Mutex::default(),
        }
    }

    pub fn sent(&self) -> Vec<String> {
        self.sent.lock().expect("not poisoned").clone()
    }
}

impl Transport for ScriptedTransport {
    fn send(&self, body: &str) -> Result<String, TransportError> {
        self.sent.lock().expect("not poisoned").push(body.to_string());
        match self.replies.lock().expect("not poisoned").pop_front() {
            Some(CannedReply::Body { body }) => Ok(body),
            Some(CannedReply::Error { error }) => Err(TransportError::Unavailable(error)),
            None => Err(TransportError::Unavailable("script exhausted".into())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub name: String,
    pub decision: PolicyDecision,
    pub requests: Vec<String>,
}

impl WireCase {
    pub fn load(dir: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(dir.join("case.json")).map_err(|e| format!("{}: {e}", dir.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", dir.display()))
    }

    pub fn schema(&self) -> RegistrySchema {
        RegistrySchema {
            tools: standard_registry(self.memory.is_some()).tools().to_vec(),
            landmarks: self.landmarks.clone(),
            memory: self.memory.clone(),
        }
    }

    /// Runs one decision against the canned replies.
    pub fn replay(&self) -> (PolicyDecision, Vec<String>) {
        let adapter: Box<dyn WireAdapter> = match &self.adapter {
            AdapterSpec::Plain => Box::new(PlainAdapter),
            AdapterSpec::Chat { model } => Box::new(ChatAdapter::new(model.clone())),
        };
        let transport = std::sync::Arc::new(ScriptedTransport::new(self.replies.clone()));
        let mut policy = ExternalPolicy::new(Box::new(transport.clone()), adapter, self.retries);
        let schema = self.schema();
        let ctx = PolicyContext {
            instruction: &self.instruction,
            steps: &self.trace,
            remaining_budget: self.remaining_budget,
            schema: &schema,
        };
        let decision = policy.decide(&ctx);
        (decision, transport.sent())
    }
}

/// Golden request files of a case, in send order.
pub fn golden_requests(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for i in 1.. {
        let p = dir.join(format!("request_{i}.json"));
        if !p.exists() {
            break;
        }
        out.push(p);
    }
    out
}

fn same_decision(expected: &PolicyDecision, got: &PolicyDecision) -> bool {
    match (expected, got) {
        // Abort reasons are free text.
        (PolicyDecision::Abort { .. }, PolicyDecision::Abort { .. }) => true,
        _ => expected == got,
    }
}

/// Checks one fixture directory. With `bless`, rewrites the golden
/// request files from the current serializer instead of comparing.
pub fn check_case(dir: &Path, bless: bool) -> Result<CaseOutcome, String> {
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let case = WireCase::load(dir)?;
    let (decision, requests) = case.replay();
    if bless {
        for old in golden_requests(dir) {
            fs::remove_file(old).map_err(|e| e.to_string())?;
        }
        for (i, body) in requests.iter().enumerate() {
            fs::write(dir.join(format!("request_{}.json", i + 1)), body).map_err(|e| e.to_string())?;
        }
    }
    let golden = golden_requests(dir);
    if golden.len() != requests.len() {
        return Err(format!("{name}: sent {} requests, corpus has {}", requests.len(), golden.len()));
    }
    for (i, (path, body)) in golden.iter().zip(&requests).enumerate() {
        let want = fs::read(path).map_err(|e| e.to_string())?;
        if want != body.as_bytes() {
            return Err(format!("{name}: request {} differs from {}", i + 1, path.display()));
        }
    }
    if !same_decision(&case.expected, &decision) {
        return Err(format!("{name}: expected {:?}, got {decision:?}", case.expected));
    }
    Ok(CaseOutcome {
        name,
        decision,
        requests,
    })
}

/// All fixture directories under `root`, sorted by name.
pub fn case_dirs(root: &Path) -> Result<Vec<PathBuf>, String> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| format!("{}: {e}", root.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("case.json").exists())
        .collect();
    dirs.sort();
    Ok(dirs)
}
