//! Client side of the policy wire protocol: any process that can answer
//! "given this instruction, trace and budget, which tool next?" can drive an
//! episode.

use std::collections::BTreeMap;

use recall_core::{Action, ArgKind, ArgValue, Outcome, ToolSchema};
use recall_embed::{send_with_retries, Transport};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Policy, PolicyContext, PolicyDecision};
use crate::tools::{LandmarkInfo, MemoryInfo};

pub const WIRE_VERSION: &str = "policy-wire/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub action: Action,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireEnvironment {
    pub landmarks: Vec<LandmarkInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<MemoryInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRequest {
    pub schema_version: String,
    pub instruction: String,
    pub remaining_budget: u32,
    pub tool_schemas: Vec<ToolSchema>,
    pub environment: WireEnvironment,
    pub trace: Vec<TraceEntry>,
    /// Parse error from the previous reply, when this is a reprompt.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reprompt: Option<String>,
}

impl PolicyRequest {
    pub fn from_context(ctx: &PolicyContext<'_>) -> Self {
        Self {
            schema_version: WIRE_VERSION.to_string(),
            instruction: ctx.instruction.to_string(),
            remaining_budget: ctx.remaining_budget,
            tool_schemas: ctx.schema.tools.clone(),
            environment: WireEnvironment {
                landmarks: ctx.schema.landmarks.clone(),
                memory: ctx.schema.memory.clone(),
            },
            trace: ctx
                .steps
                .iter()
                .map(|s| TraceEntry {
                    action: s.action.clone(),
                    outcome: s.outcome.clone(),
                })
                .collect(),
            reprompt: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyResponse {
    pub tool: String,
    #[serde(default)]
    pub args: BTreeMap<String, ArgValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

impl PolicyResponse {
    pub fn into_decision(self) -> PolicyDecision {
        PolicyDecision::Act {
            action: Action {
                tool: self.tool,
                args: self.args,
            },
            rationale: self.rationale,
        }
    }
}

/// Encodes requests into a transport body and decodes reply bodies.
pub trait WireAdapter: Send + Sync {
    fn encode(&self, req: &PolicyRequest) -> String;
    fn decode(&self, body: &str) -> Result<PolicyResponse, String>;
}

/// The bare protocol: request and response JSON as-is.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlainAdapter;

impl WireAdapter for PlainAdapter {
    fn encode(&self, req: &PolicyRequest) -> String {
        serde_json::to_string(req).expect("request serializes")
    }

    fn decode(&self, body: &str) -> Result<PolicyResponse, String> {
        parse_response(body)
    }
}

fn parse_response(text: &str) -> Result<PolicyResponse, String> {
    let r: PolicyResponse = serde_json::from_str(text.trim()).map_err(|e| format!("malformed reply: {e}"))?;
    if r.tool.trim().is_empty() {
        return Err("malformed reply: empty tool name".into());
    }
    Ok(r)
}

const SYSTEM_PROMPT: &str = "You control a household robot searching for an object. \
Each turn, call exactly one tool: memory tools search past observations, \
physical tools act in the home now. Every call costs one step of the remaining budget. \
The object is retrieved when you pick the right entity.";

/// Wraps the protocol in a chat-completion request with function tools and
/// reads the reply from the first tool call (or, failing that, from a JSON
/// message body).
#[derive(Debug, Clone)]
pub struct ChatAdapter {
    pub model: String,
}

impl ChatAdapter {
    pub fn new(model: impl Into<String>) -> Self {
        Self { model: model.into() }
    }

    fn function(tool: &ToolSchema) -> Value {
        let mut properties = serde_json::Map::new();
        let mut required = Vec::new();
        for a in &tool.args {
            let ty = match a.kind {
                ArgKind::Integer => "integer",
                ArgKind::Number => "number",
                _ => "string",
            };
            let mut p = json!({ "type": ty });
            if let Some(d) = &a.description {
                p["description"] = json!(d);
            }
            properties.insert(a.name.clone(), p);
            if a.required {
                required.push(a.name.clone());
            }
        }
        json!({
            "type": "function",
            "function": {
                "name": tool.name,
                "description": tool.description,
                "parameters": { "type": "object", "properties": properties, "required": required },
            }
        })
    }
}

impl WireAdapter for ChatAdapter {
    fn encode(&self, req: &PolicyRequest) -> String {
        let mut messages = vec![
            json!({ "role": "system", "content": SYSTEM_PROMPT }),
            json!({ "role": "user", "content": serde_json::to_string(req).expect("request serializes") }),
        ];
        if let Some(err) = &req.reprompt {
            messages.push(json!({
                "role": "user",
                "content": format!("Your previous reply could not be used ({err}). Reply with exactly one tool call."),
            }));
        }
        let body = json!({
            "model": self.model,
            "messages": messages,
            "tools": req.tool_schemas.iter().map(Self::function).collect::<Vec<_>>(),
            "tool_choice": "required",
        });
        serde_json::to_string(&body).expect("request serializes")
    }

    fn decode(&self, body: &str) -> Result<PolicyResponse, String> {
        let v: Value = serde_json::from_str(body).map_err(|e| format!("malformed reply: {e}"))?;
        let msg = &v["choices"][0]["message"];
        if msg.is_null() {
            return Err("malformed reply: no choices".into());
        }
        let calls = msg["tool_calls"].as_array().map(Vec::as_slice).unwrap_or_default();
        match calls {
            [] => match msg["content"].as_str() {
                Some(text) => parse_response(text),
                None => Err("malformed reply: neither tool call nor content".into()),
            },
            [call] => {
                let f = &call["function"];
                let name = f["name"].as_str().ok_or("malformed reply: tool call without name")?;
                let args = match &f["arguments"] {
                    Value::String(s) if s.trim().is_empty() => BTreeMap::new(),
                    Value::String(s) => {
                        serde_json::from_str(s).map_err(|e| format!("malformed reply: bad arguments: {e}"))?
                    }
                    Value::Null => BTreeMap::new(),
                    other => serde_json::from_value(other.clone())
                        .map_err(|e| format!("malformed reply: bad arguments: {e}"))?,
                };
                Ok(PolicyResponse {
                    tool: name.to_string(),
                    args,
                    rationale: msg["content"].as_str().filter(|s| !s.is_empty()).map(str::to_string),
                })
            }
            _ => Err(format!("malformed reply: expected one tool call, got {}", calls.len())),
        }
    }
}

/// Policy backed by a remote decision maker. Malformed replies get one
/// reprompt carrying the parse error; a second malformed reply, or a
/// transport failure after retries, aborts the episode.
pub struct ExternalPolicy {
    name: String,
    transport: Box<dyn Transport>,
    adapter: Box<dyn WireAdapter>,
    retries: u32,
    last_request: Option<String>,
}

impl ExternalPolicy {
    pub fn new(transport: Box<dyn Transport>, adapter: Box<dyn WireAdapter>, retries: u32) -> Self {
        Self {
            name: "llm".into(),
            transport,
            adapter,
            retries,
            last_request: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Body of the most recent request sent.
    pub fn last_request(&self) -> Option<&str> {
        self.last_request.as_deref()
    }

    fn exchange(&mut self, req: &PolicyRequest) -> Result<Result<PolicyResponse, String>, String> {
        let body = self.adapter.encode(req);
        let reply = send_with_retries(self.transport.as_ref(), &body, self.retries);
        self.last_request = Some(body);
        let reply = reply.map_err(|e| e.to_string())?;
        Ok(self.adapter.decode(&reply))
    }
}

impl Policy for ExternalPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn decide(&mut self, ctx: &PolicyContext<'_>) -> PolicyDecision {
        let mut req = PolicyRequest::from_context(ctx);
        let first = match self.exchange(&req) {
            Ok(r) => r,
            Err(e) => return PolicyDecision::abort(format!("transport: {e}")),
        };
        let err = match first {
            Ok(r) => return r.into_decision(),
            Err(e) => e,
        };
        req.reprompt = Some(err);
        match self.exchange(&req) {
            Ok(Ok(r)) => r.into_decision(),
            Ok(Err(e)) => PolicyDecision::abort(format!("after reprompt: {e}")),
            Err(e) => PolicyDecision::abort(format!("transport: {e}")),
        }
    }
}
