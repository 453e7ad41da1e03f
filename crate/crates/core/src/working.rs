use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::instruction::Instruction;
use crate::outcome::Outcome;

/// One executed `(action, outcome)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub action: Action,
    pub outcome: Outcome,
}

/// The per-task action/outcome trajectory. Append-only; past steps are
/// never exposed mutably.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkingMemory {
    instruction: Instruction,
    steps: Vec<Step>,
    budget: u32,
}

impl WorkingMemory {
    pub fn new(instruction: Instruction, budget: u32) -> Self {
        Self {
            instruction,
            steps: Vec::new(),
            budget,
        }
    }

    pub fn instruction(&self) -> &Instruction {
        &self.instruction
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// `K - k`, saturating at zero.
    pub fn remaining_budget(&self) -> u32 {
        self.budget.saturating_sub(self.steps.len() as u32)
    }

    pub fn push(&mut self, action: Action, outcome: Outcome) {
        self.steps.push(Step { action, outcome });
    }

    /// Functional form of [`push`](Self::push): `H ⊕ (a, y)`.
    pub fn appended(mut self, action: Action, outcome: Outcome) -> Self {
        self.push(action, outcome);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_keeps_order_and_prefix() {
        let mut h = WorkingMemory::new(Instruction::new("find the mug"), 20);
        assert_eq!(h.remaining_budget(), 20);
        for i in 0..5 {
            let before = h.steps().to_vec();
            h = h.appended(Action::new("detect").arg("i", i as i64), Outcome::success());
            assert_eq!(&h.steps()[..before.len()], &before[..]);
        }
        assert_eq!(h.len(), 5);
        assert_eq!(h.remaining_budget(), 15);
        let order: Vec<i64> = h.steps().iter().map(|s| s.action.int("i").unwrap()).collect();
        assert_eq!(order, vec![0, 1, 2, 3, 4]);
    }
}
