use serde::{Deserialize, Serialize};

use crate::world::Location;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EventOp {
    Move { object: String, to: Location },
    Open { receptacle: String },
    Close { receptacle: String },
}

impl EventOp {
    pub fn object(&self) -> Option<&str> {
        match self {
            EventOp::Move { object, .. } => Some(object),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledEvent {
    pub day: u64,
    pub tick_of_day: u64,
    #[serde(flatten)]
    pub op: EventOp,
}

impl ScheduledEvent {
    pub fn new(day: u64, tick_of_day: u64, op: EventOp) -> Self {
        Self { day, tick_of_day, op }
    }

    pub fn moving(day: u64, tick_of_day: u64, object: &str, to: Location) -> Self {
        Self::new(
            day,
            tick_of_day,
            EventOp::Move {
                object: object.into(),
                to,
            },
        )
    }

    pub fn tick(&self, ticks_per_day: u64) -> u64 {
        self.day * ticks_per_day + self.tick_of_day
    }
}

/// Exogenous changes to the world. Events fire at the start of their tick,
/// before anything is observed; events sharing a tick fire in list order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Schedule {
    pub seed: u64,
    pub events: Vec<ScheduledEvent>,
}

impl Schedule {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, event: ScheduledEvent) {
        self.events.push(event);
    }

    /// Drops every move of the listed objects.
    pub fn without_objects(&self, objects: &[&str]) -> Schedule {
        Schedule {
            seed: self.seed,
            events: self
                .events
                .iter()
                .filter(|e| e.op.object().map_or(true, |o| !objects.contains(&o)))
                .cloned()
                .collect(),
        }
    }

    /// Appends `other`'s events after this schedule's; the stable sort in
    /// replay keeps this order for events sharing a tick.
    pub fn merged(&self, other: &Schedule) -> Schedule {
        let mut events = self.events.clone();
        events.extend(other.events.iter().cloned());
        Schedule {
            seed: self.seed,
            events,
        }
    }

    /// Events in firing order as absolute ticks.
    pub fn timeline(&self, ticks_per_day: u64) -> Vec<(u64, EventOp)> {
        let mut tl: Vec<(u64, EventOp)> = self
            .events
            .iter()
            .map(|e| (e.tick(ticks_per_day), e.op.clone()))
            .collect();
        tl.sort_by_key(|(t, _)| *t);
        tl
    }
}
