//! Executes validated actions: temporal tools against long-term memory,
//! spatial tools against the simulated world.

use recall_core::{Action, ActionCategory, FieldError, Outcome, ToolRegistry};
use recall_embed::Embedder;
use recall_homesim::Simulation;
use recall_memstore::{LongTermMemory, MemError, QueryResult, TemporalQuery, DEFAULT_R};

use crate::tools::*;

/// Memory side of the environment.
pub struct MemoryAccess<'a> {
    pub memory: &'a LongTermMemory,
    pub embedder: &'a dyn Embedder,
}

pub struct Environment<'a> {
    pub registry: &'a ToolRegistry,
    pub memory: Option<MemoryAccess<'a>>,
    pub sim: &'a mut Simulation,
}

fn rejected(field: &str, problem: impl Into<String>) -> Outcome {
    Outcome::Rejected {
        diagnostics: vec![FieldError {
            field: field.into(),
            problem: problem.into(),
        }],
    }
}

fn retrieval(res: QueryResult) -> Outcome {
    Outcome::Retrieval {
        hits: res
            .hits
            .iter()
            .zip(&res.records)
            .map(|(h, rec)| rec.view(h.index, h.score))
            .collect(),
    }
}

fn mem_outcome(res: Result<QueryResult, MemError>, field: &str) -> Outcome {
    match res {
        Ok(r) => retrieval(r),
        Err(e) => rejected(field, e.to_string()),
    }
}

impl Environment<'_> {
    /// Category used for accounting; unknown tools count as temporal queries.
    pub fn category(&self, action: &Action) -> ActionCategory {
        self.registry
            .get(&action.tool)
            .map_or(ActionCategory::TemporalQuery, |t| t.category)
    }

    /// Runs an action that already passed schema validation.
    pub fn execute(&mut self, action: &Action) -> Outcome {
        match action.tool.as_str() {
            NAVIGATE => self.sim.navigate(action.text("landmark").unwrap_or_default()),
            DETECT => Outcome::Perception {
                detection: self.sim.detect(),
            },
            OPEN => self.sim.open(action.text("receptacle").unwrap_or_default()),
            PICK => self.sim.pick(action.text("entity").unwrap_or_default()),
            tool => self.execute_temporal(tool, action),
        }
    }

    fn execute_temporal(&mut self, tool: &str, action: &Action) -> Outcome {
        let Some(mem) = &self.memory else {
            return rejected("tool", format!("{tool} needs long-term memory, none is attached"));
        };
        let r = action.int("r").map_or(DEFAULT_R, |r| r as usize);
        let m = mem.memory;
        match tool {
            SEMANTIC_QUERY => mem_outcome(
                m.query_semantic(mem.embedder, action.text("text").unwrap_or_default(), r),
                "text",
            ),
            TEMPORAL_QUERY => mem_outcome(
                m.query_temporal(TemporalQuery::Point(action.int("timestamp").unwrap_or(0) as u64), r),
                "timestamp",
            ),
            TEMPORAL_WINDOW_QUERY => mem_outcome(
                m.query_temporal(
                    TemporalQuery::Window {
                        day_start: action.int("day_start").unwrap_or(0) as u64,
                        day_end: action.int("day_end").unwrap_or(0) as u64,
                    },
                    r,
                ),
                "day_start",
            ),
            SPATIAL_QUERY => mem_outcome(
                m.query_spatial(
                    [action.number("x").unwrap_or(0.0), action.number("y").unwrap_or(0.0)],
                    action.number("radius").unwrap_or(0.0),
                    r,
                ),
                "radius",
            ),
            FETCH_RAW => {
                let index = action.int("record_index").unwrap_or(0) as usize;
                match m.fetch_raw(index) {
                    Ok(obs) => Outcome::RawObservation {
                        record_index: index,
                        observation: obs.clone(),
                    },
                    Err(e) => rejected("record_index", e.to_string()),
                }
            }
            other => rejected("tool", format!("no executor for {other}")),
        }
    }
}
