use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Planar robot pose: position in meters, heading in radians, and the room
/// that contains the position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 2],
    pub yaw: f64,
    pub room_id: String,
}

impl Pose {
    pub fn new(x: f64, y: f64, yaw: f64, room_id: impl Into<String>) -> Self {
        Self {
            position: [x, y],
            yaw: normalize_yaw(yaw),
            room_id: room_id.into(),
        }
    }

    pub fn distance_to(&self, point: [f64; 2]) -> f64 {
        euclidean(self.position, point)
    }
}

pub fn euclidean(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Wraps an angle into `[-pi, pi)`.
pub fn normalize_yaw(yaw: f64) -> f64 {
    if !yaw.is_finite() {
        return 0.0;
    }
    let two_pi = 2.0 * PI;
    let mut y = (yaw + PI).rem_euclid(two_pi) - PI;
    if y >= PI {
        y -= two_pi;
    }
    y
}
