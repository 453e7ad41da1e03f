//! Tool-argument actions and the tool registry they are validated against.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// A single argument value. Serialized untagged so that wire messages read
/// as plain JSON objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArgValue {
    Int(i64),
    Num(f64),
    Text(String),
}

impl ArgValue {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            ArgValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            ArgValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ArgValue::Int(i) => Some(*i as f64),
            ArgValue::Num(x) => Some(*x),
            ArgValue::Text(_) => None,
        }
    }

    fn type_name(&self) -> &'static str {
        match self {
            ArgValue::Int(_) => "integer",
            ArgValue::Num(_) => "number",
            ArgValue::Text(_) => "text",
        }
    }
}

impl From<&str> for ArgValue {
    fn from(s: &str) -> Self {
        ArgValue::Text(s.to_string())
    }
}

impl From<String> for ArgValue {
    fn from(s: String) -> Self {
        ArgValue::Text(s)
    }
}

impl From<i64> for ArgValue {
    fn from(i: i64) -> Self {
        ArgValue::Int(i)
    }
}

impl From<i32> for ArgValue {
    fn from(i: i32) -> Self {
        ArgValue::Int(i.into())
    }
}

impl From<usize> for ArgValue {
    fn from(i: usize) -> Self {
        ArgValue::Int(i as i64)
    }
}

impl From<u64> for ArgValue {
    fn from(i: u64) -> Self {
        ArgValue::Int(i as i64)
    }
}

impl From<f64> for ArgValue {
    fn from(x: f64) -> Self {
        ArgValue::Num(x)
    }
}

/// A tool invocation `(tool, args)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub tool: String,
    #[serde(default)]
    pub args: BTreeMap<String, ArgValue>,
}

impl Action {
    pub fn new(tool: impl Into<String>) -> Self {
        Self {
            tool: tool.into(),
            args: BTreeMap::new(),
        }
    }

    pub fn arg(mut self, name: &str, value: impl Into<ArgValue>) -> Self {
        self.args.insert(name.to_string(), value.into());
        self
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        self.args.get(name).and_then(ArgValue::as_text)
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        self.args.get(name).and_then(ArgValue::as_int)
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        self.args.get(name).and_then(ArgValue::as_f64)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.tool)?;
        for (i, (k, v)) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match v {
                ArgValue::Int(x) => write!(f, "{k}={x}")?,
                ArgValue::Num(x) => write!(f, "{k}={x}")?,
                ArgValue::Text(x) => write!(f, "{k}={x:?}")?,
            }
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgKind {
    Text,
    /// Non-negative integer.
    Integer,
    Number,
    LandmarkId,
    EntityId,
    ReceptacleId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgSpec {
    pub name: String,
    pub kind: ArgKind,
    pub required: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl ArgSpec {
    pub fn required(name: &str, kind: ArgKind) -> Self {
        Self {
            name: name.into(),
            kind,
            required: true,
            description: None,
        }
    }

    pub fn optional(name: &str, kind: ArgKind) -> Self {
        Self {
            name: name.into(),
            kind,
            required: false,
            description: None,
        }
    }

    pub fn describe(mut self, text: &str) -> Self {
        self.description = Some(text.into());
        self
    }
}

/// Which world a tool searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolDomain {
    /// Runs against long-term memory (search in time).
    Temporal,
    /// Runs against the live world (search in space).
    Spatial,
}

/// Accounting bucket for executed actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionCategory {
    TemporalQuery,
    Perception,
    Navigation,
    Manipulation,
}

impl ActionCategory {
    pub fn domain(&self) -> ToolDomain {
        match self {
            ActionCategory::TemporalQuery => ToolDomain::Temporal,
            _ => ToolDomain::Spatial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Retrieval,
    Perception,
    SkillResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSchema {
    pub name: String,
    pub category: ActionCategory,
    pub output: OutputKind,
    pub description: String,
    pub args: Vec<ArgSpec>,
}

impl ToolSchema {
    pub fn domain(&self) -> ToolDomain {
        self.category.domain()
    }
}

/// Field-level validation diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub problem: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("action {tool:?} rejected: {}", .diagnostics.iter().map(|d| format!("{}: {}", d.field, d.problem)).collect::<Vec<_>>().join("; "))]
pub struct SchemaError {
    pub tool: String,
    pub diagnostics: Vec<FieldError>,
}

/// The unified tool set exposed to policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolRegistry {
    tools: Vec<ToolSchema>,
}

impl ToolRegistry {
    pub fn new(tools: Vec<ToolSchema>) -> Result<Self, CoreError> {
        if tools.is_empty() {
            return Err(CoreError::Invalid("tool registry is empty".into()));
        }
        let mut names = BTreeSet::new();
        for t in &tools {
            if !names.insert(t.name.as_str()) {
                return Err(CoreError::Invalid(format!("duplicate tool {}", t.name)));
            }
            let mut arg_names = BTreeSet::new();
            for a in &t.args {
                if !arg_names.insert(a.name.as_str()) {
                    return Err(CoreError::Invalid(format!("tool {} declares argument {} twice", t.name, a.name)));
                }
            }
        }
        Ok(Self { tools })
    }

    pub fn tools(&self) -> &[ToolSchema] {
        &self.tools
    }

    pub fn get(&self, name: &str) -> Option<&ToolSchema> {
        self.tools.iter().find(|t| t.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn has_domain(&self, domain: ToolDomain) -> bool {
        self.tools.iter().any(|t| t.domain() == domain)
    }
}

/// Checks that `action` names a registered tool and that its arguments
/// match the tool's declared schema.
pub fn validate_action(action: &Action, registry: &ToolRegistry) -> Result<(), SchemaError> {
    let Some(schema) = registry.get(&action.tool) else {
        return Err(SchemaError {
            tool: action.tool.clone(),
            diagnostics: vec![FieldError {
                field: "tool".into(),
                problem: format!("unknown tool {:?}", action.tool),
            }],
        });
    };
    let mut diagnostics = Vec::new();
    for spec in &schema.args {
        match action.args.get(&spec.name) {
            None if spec.required => diagnostics.push(FieldError {
                field: spec.name.clone(),
                problem: "missing required argument".into(),
            }),
            None => {}
            Some(v) => {
                if let Some(problem) = check_kind(spec.kind, v) {
                    diagnostics.push(FieldError {
                        field: spec.name.clone(),
                        problem,
                    });
                }
            }
        }
    }
    for name in action.args.keys() {
        if !schema.args.iter().any(|a| &a.name == name) {
            diagnostics.push(FieldError {
                field: name.clone(),
                problem: format!("unexpected argument for {}", schema.name),
            });
        }
    }
    if diagnostics.is_empty() {
        Ok(())
    } else {
        Err(SchemaError {
            tool: action.tool.clone(),
            diagnostics,
        })
    }
}

fn check_kind(kind: ArgKind, value: &ArgValue) -> Option<String> {
    match (kind, value) {
        (ArgKind::Integer, ArgValue::Int(i)) if *i >= 0 => None,
        (ArgKind::Integer, ArgValue::Int(i)) => Some(format!("expected non-negative integer, got {i}")),
        (ArgKind::Number, ArgValue::Int(_)) => None,
        (ArgKind::Number, ArgValue::Num(x)) if x.is_finite() => None,
        (ArgKind::Number, ArgValue::Num(_)) => Some("expected finite number".into()),
        (ArgKind::Text | ArgKind::LandmarkId | ArgKind::EntityId | ArgKind::ReceptacleId, ArgValue::Text(s)) => {
            if s.trim().is_empty() {
                Some("expected non-empty text".into())
            } else {
                None
            }
        }
        (k, v) => Some(format!("expected {k:?}, got {}", v.type_name()).to_lowercase()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> ToolRegistry {
        ToolRegistry::new(vec![
            ToolSchema {
                name: "navigate".into(),
                category: ActionCategory::Navigation,
                output: OutputKind::SkillResult,
                description: "move to a landmark".into(),
                args: vec![ArgSpec::required("landmark", ArgKind::LandmarkId)],
            },
            ToolSchema {
                name: "temporal_query".into(),
                category: ActionCategory::TemporalQuery,
                output: OutputKind::Retrieval,
                description: "records near a timestep".into(),
                args: vec![
                    ArgSpec::required("timestamp", ArgKind::Integer),
                    ArgSpec::optional("r", ArgKind::Integer),
                ],
            },
        ])
        .unwrap()
    }

    #[test]
    fn navigate_with_landmark_is_ok() {
        let a = Action::new("navigate").arg("landmark", "study_desk");
        assert!(validate_action(&a, &registry()).is_ok());
    }

    #[test]
    fn navigate_with_timestamp_is_rejected() {
        let a = Action::new("navigate").arg("timestamp", 5i64);
        let err = validate_action(&a, &registry()).unwrap_err();
        let fields: Vec<_> = err.diagnostics.iter().map(|d| d.field.as_str()).collect();
        assert!(fields.contains(&"landmark"));
        assert!(fields.contains(&"timestamp"));
    }

    #[test]
    fn unknown_tool_is_rejected() {
        let err = validate_action(&Action::new("unknown_tool"), &registry()).unwrap_err();
        assert_eq!(err.diagnostics[0].field, "tool");
    }

    #[test]
    fn integer_kind_checks() {
        let reg = registry();
        assert!(validate_action(&Action::new("temporal_query").arg("timestamp", 3i64), &reg).is_ok());
        assert!(validate_action(&Action::new("temporal_query").arg("timestamp", -3i64), &reg).is_err());
        assert!(validate_action(&Action::new("temporal_query").arg("timestamp", "3"), &reg).is_err());
        assert!(validate_action(&Action::new("temporal_query").arg("timestamp", 3.5), &reg).is_err());
    }

    #[test]
    fn duplicate_tool_names_rejected() {
        let t = registry().tools()[0].clone();
        assert!(ToolRegistry::new(vec![t.clone(), t]).is_err());
        assert!(ToolRegistry::new(vec![]).is_err());
    }

    #[test]
    fn arg_values_keep_their_json_shape() {
        let a = Action::new("q").arg("i", 5i64).arg("x", 5.0).arg("s", "five");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"tool":"q","args":{"i":5,"s":"five","x":5.0}}"#);
        let back: Action = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }
}
