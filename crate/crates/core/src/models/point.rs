use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::C64;
use crate::models::ManifoldModel;

/// Point of the open unit-disk chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x * x + y * y >= 1.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::OutsideChart { x, y });
        }
        Ok(Point { x, y })
    }

    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn z(&self) -> C64 {
        C64::new(self.x, self.y)
    }

    pub fn from_c(z: C64) -> Result<Self> {
        Point::new(z.re, z.im)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// Tangent vector in chart components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub vx: f64,
    pub vy: f64,
}

/// Tangent vector normalized to unit Riemannian length for a given model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitTangent {
    pub base: Point,
    pub vx: f64,
    pub vy: f64,
}

impl UnitTangent {
    /// Normalizes the chart components so that g(v, v) = 1.
    pub fn new(model: &ManifoldModel, base: Point, vx: f64, vy: f64) -> Result<Self> {
        let speed = (vx * vx + vy * vy).sqrt();
        if speed == 0.0 || !speed.is_finite() {
            return Err(Error::Degenerate("zero tangent vector".into()));
        }
        // exp(Phi) |v| = 1  =>  scale by exp(-Phi)/|v|
        let factor = (-model.conformal_factor_disk(base.z())).exp() / speed;
        Ok(UnitTangent {
            base,
            vx: vx * factor,
            vy: vy * factor,
        })
    }

    /// Unit tangent at `base` pointing in chart direction `angle`.
    pub fn from_angle(model: &ManifoldModel, base: Point, angle: f64) -> Result<Self> {
        UnitTangent::new(model, base, angle.cos(), angle.sin())
    }

    /// Chart direction angle.
    pub fn angle(&self) -> f64 {
        self.vy.atan2(self.vx)
    }

    /// The reversed vector -v.
    pub fn flip(&self) -> UnitTangent {
        UnitTangent {
            base: self.base,
            vx: -self.vx,
            vy: -self.vy,
        }
    }

    /// Riemannian squared norm under the model metric.
    pub fn norm_sq(&self, model: &ManifoldModel) -> f64 {
        let lam = (2.0 * model.conformal_factor_disk(self.base.z())).exp();
        lam * (self.vx * self.vx + self.vy * self.vy)
    }
}
