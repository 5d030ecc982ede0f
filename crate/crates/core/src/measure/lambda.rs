//! Visual measures lambda_x on the boundary circle.
//!
//! lambda_x is the image of the uniform direction measure at x under
//! the map sending a direction to the ideal endpoint of its ray. In the
//! origin chart lambda_0 is uniform; for other base points the density
//! is the Jacobian of the direction transfer map, computed by finite
//! differences of ray tracing.

use crate::boundary::landing::landing;
use crate::error::Result;
use crate::models::{ManifoldModel, Point};

/// Finite-difference step (radians) of the direction-transfer Jacobian.
const FD_STEP: f64 = 1e-4;

/// Density of lambda_x at the boundary point with chart angle theta,
/// with respect to the plain angle measure dtheta (so the origin
/// density is 1/(2 pi) and the total integral is 1).
pub fn lambda_density(model: &ManifoldModel, x: Point, theta: f64) -> Result<f64> {
    if x == Point::ORIGIN {
        return Ok(1.0 / std::f64::consts::TAU);
    }
    let lm = landing(model);
    let transfer = |th: f64| -> Result<f64> {
        crate::boundary::rays::direction_to_ideal(model, x, lm.to_euclid(th))
    };
    let up = transfer(theta + FD_STEP)?;
    let dn = transfer(theta - FD_STEP)?;
    let dphi = crate::hyperbolic::wrap_angle(up - dn) / (2.0 * FD_STEP);
    Ok(dphi.abs() / std::f64::consts::TAU)
}

/// Radon-Nikodym derivative d lambda_y / d lambda_x at theta.
pub fn rn_lambda(model: &ManifoldModel, x: Point, y: Point, theta: f64) -> Result<f64> {
    if x == y {
        return Ok(1.0);
    }
    Ok(lambda_density(model, y, theta)? / lambda_density(model, x, theta)?)
}

/// Handle bundling a base point with its density evaluator.
pub struct BoundaryMeasure<'m> {
    pub model: &'m ManifoldModel,
    pub base: Point,
}

impl<'m> BoundaryMeasure<'m> {
    pub fn new(model: &'m ManifoldModel, base: Point) -> Self {
        BoundaryMeasure { model, base }
    }

    pub fn density(&self, theta: f64) -> Result<f64> {
        lambda_density(self.model, self.base, theta)
    }

    /// Total mass by the trapezoid rule on n nodes (should be 1).
    pub fn total_mass(&self, n: usize) -> Result<f64> {
        let h = std::f64::consts::TAU / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.density(i as f64 * h)?;
        }
        Ok(acc * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson(x: Point, theta: f64) -> f64 {
        let xi = crate::hyperbolic::C64::from_polar(1.0, theta);
        (1.0 - x.z().norm_sq()) / (xi - x.z()).norm_sq()
    }

    #[test]
    fn origin_density_is_uniform() {
        let m = ManifoldModel::constant();
        let d = lambda_density(&m, Point::ORIGIN, 1.3).unwrap();
        assert_eq!(d, 1.0 / std::f64::consts::TAU);
    }

    #[test]
    fn constant_model_density_is_harmonic() {
        let m = ManifoldModel::constant();
        let x = Point::new(0.5, 0.0).unwrap();
        for theta in [0.0, std::f64::consts::PI] {
            let d = lambda_density(&m, x, theta).unwrap();
            let expected = poisson(x, theta) / std::f64::consts::TAU;
            assert!(
                (d - expected).abs() < 1e-5 * expected.max(1.0),
                "density {d} vs harmonic {expected} at theta {theta}"
            );
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let m = ManifoldModel::constant();
        let mu = BoundaryMeasure::new(&m, Point::new(0.3, -0.2).unwrap());
        let total = mu.total_mass(512).unwrap();
        assert!((total - 1.0).abs() < 1e-6, "total {total}");
    }

    #[test]
    fn rn_lambda_telescopes() {
        let m = ManifoldModel::constant();
        let x = Point::new(0.2, 0.1).unwrap();
        let y = Point::new(-0.1, 0.3).unwrap();
        let z = Point::new(0.4, -0.2).unwrap();
        let theta = 0.9;
        let rxy = rn_lambda(&m, x, y, theta).unwrap();
        let ryz = rn_lambda(&m, y, z, theta).unwrap();
        let rxz = rn_lambda(&m, x, z, theta).unwrap();
        assert!((rxy * ryz - rxz).abs() < 1e-6);
        assert_eq!(rn_lambda(&m, x, x, theta).unwrap(), 1.0);
    }
}
