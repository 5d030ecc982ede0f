//! The chart map between boundary directions and Euclidean landing
//! angles.
//!
//! A boundary point is charted by the initial direction (at the origin)
//! of the ray converging to it. Rays of the perturbed metric land at
//! Euclidean circle points that differ from their initial direction;
//! this module tabulates that circle map E and its inverse. On the
//! constant model E is the identity.

use crate::hyperbolic::wrap_angle;
use crate::models::{trace, ChartState, ManifoldModel, Point, UnitTangent};
use crate::num::interp::PeriodicSpline;
use crate::num::ode::StepControl;

#[derive(Debug)]
pub struct LandingMap {
    /// spline of E(theta) - theta; None for the identity map.
    offset: Option<PeriodicSpline>,
}

impl LandingMap {
    pub(crate) fn build(model: &ManifoldModel) -> LandingMap {
        if !model.is_perturbed() {
            return LandingMap { offset: None };
        }
        let n = crate::defaults::LANDING_RAYS;
        let ctrl = StepControl {
            tol: 1e-11,
            ..Default::default()
        };
        let offsets = crate::num::par_map(n, |i| {
            let theta = std::f64::consts::TAU * i as f64 / n as f64;
            let v = UnitTangent::from_angle(model, Point::ORIGIN, theta).unwrap();
            let path = trace(
                model,
                ChartState::from_unit_tangent(&v),
                crate::defaults::LANDING_LENGTH,
                &ctrl,
                false,
            );
            let phi = match path.end {
                ChartState::Polar([_, phi, ..]) => phi,
                ChartState::Disk([x, y, ..]) => y.atan2(x),
            };
            wrap_angle(phi - theta)
        });
        LandingMap {
            offset: Some(PeriodicSpline::new(offsets)),
        }
    }

    /// E: direction chart angle -> Euclidean landing angle.
    pub fn to_euclid(&self, theta: f64) -> f64 {
        match &self.offset {
            None => theta,
            Some(sp) => theta + sp.eval(theta),
        }
    }

    /// dE/dtheta.
    pub fn to_euclid_deriv(&self, theta: f64) -> f64 {
        match &self.offset {
            None => 1.0,
            Some(sp) => 1.0 + sp.derivative(theta),
        }
    }

    /// E^{-1}: Euclidean landing angle -> direction chart angle.
    pub fn from_euclid(&self, phi: f64) -> f64 {
        match &self.offset {
            None => phi,
            Some(_) => {
                let mut theta = phi;
                for _ in 0..40 {
                    let err = wrap_angle(self.to_euclid(theta) - phi);
                    if err.abs() < 1e-13 {
                        break;
                    }
                    theta -= err / self.to_euclid_deriv(theta);
                }
                theta
            }
        }
    }

    pub fn from_euclid_deriv(&self, phi: f64) -> f64 {
        1.0 / self.to_euclid_deriv(self.from_euclid(phi))
    }
}

/// Shared per-model landing map (built once, deterministic).
pub fn landing(model: &ManifoldModel) -> &LandingMap {
    model.landing.get_or_init(|| LandingMap::build(model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_on_constant_model() {
        let m = ManifoldModel::constant();
        let lm = landing(&m);
        assert_eq!(lm.to_euclid(1.23), 1.23);
        assert_eq!(lm.from_euclid(-0.4), -0.4);
    }

    #[test]
    fn perturbed_map_is_a_symmetric_circle_diffeo() {
        let m = ManifoldModel::perturbed_default();
        let lm = landing(&m);
        // fixed directions from the model symmetries
        for ang in [0.0, PI / 2.0, PI, 1.5 * PI] {
            assert!(
                wrap_angle(lm.to_euclid(ang) - ang).abs() < 1e-6,
                "angle {ang} moved to {}",
                lm.to_euclid(ang)
            );
        }
        // odd symmetry: E(-t) = -E(t)
        for k in 1..8 {
            let t = 0.37 * k as f64;
            let a = wrap_angle(lm.to_euclid(t));
            let b = wrap_angle(-lm.to_euclid(-t));
            assert!(wrap_angle(a - b).abs() < 1e-6, "{a} vs {b}");
        }
        // monotone and invertible
        for k in 0..48 {
            let t = std::f64::consts::TAU * k as f64 / 48.0;
            assert!(lm.to_euclid_deriv(t) > 0.0);
            let back = lm.from_euclid(lm.to_euclid(t));
            assert!(wrap_angle(back - t).abs() < 1e-10);
        }
    }
}
