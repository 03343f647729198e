use serde::{Deserialize, Serialize};

/// Nodes closer than this are treated as this far apart.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// A point in the deployment plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Euclidean distance with the co-location clamp applied.
    pub fn clamped_distance(&self, other: &Point) -> f64 {
        self.distance(other).max(MIN_DISTANCE_M)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}
