use serde::{Deserialize, Serialize};

use crate::hyperbolic::wrap_angle;

/// Ideal boundary point, charted by the initial direction at the origin
/// of the geodesic ray converging to it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryPoint {
    theta: f64,
}

impl BoundaryPoint {
    pub fn new(theta: f64) -> Self {
        BoundaryPoint {
            theta: theta.rem_euclid(std::f64::consts::TAU),
        }
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    /// Angular separation in [0, pi].
    pub fn separation(&self, other: &BoundaryPoint) -> f64 {
        wrap_angle(self.theta - other.theta).abs()
    }
}

impl PartialEq for BoundaryPoint {
    fn eq(&self, other: &Self) -> bool {
        wrap_angle(self.theta - other.theta).abs() < 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_mod_two_pi() {
        let a = BoundaryPoint::new(0.5);
        let b = BoundaryPoint::new(0.5 + std::f64::consts::TAU);
        assert_eq!(a, b);
        assert_ne!(a, BoundaryPoint::new(0.5001));
    }
}
