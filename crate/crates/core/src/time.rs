use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Default number of ticks in one simulated day at desk scale.
pub const DEFAULT_TICKS_PER_DAY: u64 = 200;

/// A global tick on the patrol/execution clock together with the day it
/// falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Timestep {
    pub value: u64,
    pub day: u64,
}

impl Timestep {
    pub fn new(value: u64, ticks_per_day: u64) -> Self {
        assert!(ticks_per_day > 0, "ticks_per_day must be positive");
        Self {
            value,
            day: value / ticks_per_day,
        }
    }

    pub fn from_day_tick(day: u64, tick_of_day: u64, ticks_per_day: u64) -> Self {
        Self::new(day * ticks_per_day + tick_of_day, ticks_per_day)
    }

    pub fn tick_of_day(&self, ticks_per_day: u64) -> u64 {
        self.value % ticks_per_day
    }

    /// Checks that `day` agrees with `value` under the given day length.
    pub fn validate(&self, ticks_per_day: u64) -> Result<(), CoreError> {
        if ticks_per_day == 0 || self.day != self.value / ticks_per_day {
            return Err(CoreError::Invalid(format!(
                "timestep {} carries day {} inconsistent with {} ticks/day",
                self.value, self.day, ticks_per_day
            )));
        }
        Ok(())
    }

    pub fn abs_diff(&self, other: u64) -> u64 {
        self.value.abs_diff(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn day_is_derived_from_value() {
        let t = Timestep::new(399, 200);
        assert_eq!(t.day, 1);
        assert_eq!(t.tick_of_day(200), 199);
        assert_eq!(Timestep::from_day_tick(2, 5, 200).value, 405);
        assert!(t.validate(200).is_ok());
        assert!(t.validate(100).is_err());
    }
}
