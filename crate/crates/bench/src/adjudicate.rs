use recall_core::WorkingMemory;
use recall_agent::tools::PICK;

use crate::task::TaskSpec;

/// Success iff the ground-truth target was picked within the first
/// `budget` steps.
pub fn adjudicate(task: &TaskSpec, trace: &WorkingMemory, budget: u32) -> bool {
    trace.steps().iter().take(budget as usize).any(|s| {
        s.action.tool == PICK && s.action.text("entity") == Some(task.target.as_str()) && s.outcome.is_success()
    })
}
