//! Closed-form geometry of the curvature -1 disk model.
//!
//! These formulas serve two roles: they are the production evaluators for
//! the constant-curvature model (where the spec fixes closed forms), and
//! they provide initial guesses for the shooting solvers on the perturbed
//! model. Test oracles restate the formulas independently.

use std::f64::consts::{PI, TAU};

/// Minimal complex arithmetic; enough for Moebius transformations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
    pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }
    pub fn from_polar(r: f64, theta: f64) -> Self {
        C64::new(r * theta.cos(), r * theta.sin())
    }
    pub fn conj(self) -> Self {
        C64::new(self.re, -self.im)
    }
    pub fn norm_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    pub fn abs(self) -> f64 {
        self.norm_sq().sqrt()
    }
    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }
}

impl std::ops::Add for C64 {
    type Output = C64;
    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }
}
impl std::ops::Sub for C64 {
    type Output = C64;
    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }
}
impl std::ops::Mul for C64 {
    type Output = C64;
    fn mul(self, o: C64) -> C64 {
        C64::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}
impl std::ops::Div for C64 {
    type Output = C64;
    fn div(self, o: C64) -> C64 {
        let d = o.norm_sq();
        C64::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// Angular distance on the circle, in [0, pi].
pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Hyperbolic distance between two points of the unit disk.
pub fn disk_distance(z: C64, w: C64) -> f64 {
    let num = (z - w).abs();
    let den = (C64::ONE - z.conj() * w).abs();
    2.0 * (num / den).atanh()
}

/// Distance from the origin at Euclidean radius r.
pub fn radial_distance(r: f64) -> f64 {
    2.0 * r.atanh()
}

/// Euclidean radius of the point at hyperbolic distance s from the origin.
pub fn radius_at_distance(s: f64) -> f64 {
    (0.5 * s).tanh()
}

/// Busemann function at the ideal point xi (on the unit circle),
/// normalized to vanish at the origin. Decreases toward xi.
pub fn busemann(xi: C64, z: C64) -> f64 {
    ((xi - z).norm_sq() / (1.0 - z.norm_sq())).ln()
}

/// Initial direction (chart angle) at z of the geodesic ray from z to the
/// ideal point at Euclidean angle `xi_angle`.
pub fn ray_direction(z: C64, xi_angle: f64) -> f64 {
    let xi = C64::from_polar(1.0, xi_angle);
    ((xi - z) / (C64::ONE - z.conj() * xi)).arg()
}

/// Center and radius of the circle containing the geodesic between two
/// ideal points; `None` when the geodesic is a diameter.
pub fn geodesic_circle(angle_a: f64, angle_b: f64) -> Option<(C64, f64)> {
    let d = wrap_angle(angle_a - angle_b);
    if (d.abs() - PI).abs() < 1e-12 {
        return None;
    }
    let s = (angle_b - angle_a).sin();
    let u = (angle_b.sin() - angle_a.sin()) / s;
    let v = (angle_a.cos() - angle_b.cos()) / s;
    let c = C64::new(u, v);
    Some((c, (c.norm_sq() - 1.0).sqrt()))
}

/// Gromov product at the origin of two ideal points: -log sin(dtheta/2).
pub fn gromov_product_origin(angle_a: f64, angle_b: f64) -> f64 {
    let half = 0.5 * angular_distance(angle_a, angle_b);
    -half.sin().ln()
}

/// Gromov product at an arbitrary base point, via the Busemann change of
/// base formula.
pub fn gromov_product(base: C64, angle_a: f64, angle_b: f64) -> f64 {
    let xi = C64::from_polar(1.0, angle_a);
    let eta = C64::from_polar(1.0, angle_b);
    gromov_product_origin(angle_a, angle_b) + 0.5 * (busemann(xi, base) + busemann(eta, base))
}

/// Point of the geodesic (angle_a -> angle_b) closest to the origin.
pub fn geodesic_midpoint(angle_a: f64, angle_b: f64) -> C64 {
    match geodesic_circle(angle_a, angle_b) {
        None => C64::ZERO,
        Some((c, r)) => {
            let d = c.abs();
            let scale = (d - r) / d;
            C64::new(c.re * scale, c.im * scale)
        }
    }
}
