//! Distance evaluation: closed form on the constant model, a shooting
//! solve on the perturbed model.

use crate::error::{Error, Result};
use crate::hyperbolic::{self, wrap_angle};
use crate::models::geodesic::{trace, ChartState, GeodesicPath};
use crate::models::{ManifoldModel, Point, UnitTangent};
use crate::num::ode::StepControl;
use crate::num::quad::simpson;

/// Polar coordinates of a (possibly far) location.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PolarPos {
    pub s: f64,
    pub phi: f64,
}

impl PolarPos {
    pub(crate) fn of_point(p: Point) -> PolarPos {
        let r = p.norm().min(1.0 - 1e-16);
        PolarPos {
            s: 2.0 * r.atanh(),
            phi: p.y.atan2(p.x),
        }
    }
}

/// cosh(d) - 1 for the hyperbolic distance between two polar positions;
/// stable for far points (no cancellation).
pub(crate) fn cosh_dist_m1(a: PolarPos, b: PolarPos) -> f64 {
    let ds = 0.5 * (a.s - b.s);
    let dphi = 0.5 * wrap_angle(a.phi - b.phi);
    2.0 * ds.sinh().powi(2) + a.s.sinh() * b.s.sinh() * 2.0 * dphi.sin().powi(2)
}

pub(crate) fn hyp_dist(a: PolarPos, b: PolarPos) -> f64 {
    let u = cosh_dist_m1(a, b);
    (1.0 + u).acosh()
}

/// Closest approach of a traced path to a target position. Returns
/// (arclength at closest approach, local hyperbolic distance there).
pub(crate) fn closest_approach(path: &GeodesicPath, target: PolarPos) -> (f64, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (i, smp) in path.samples.iter().enumerate() {
        let u = cosh_dist_m1(
            PolarPos {
                s: smp.s,
                phi: smp.phi,
            },
            target,
        );
        if u < best.1 {
            best = (i, u);
        }
    }
    let i = best.0;
    let (si, pi) = path.interpolants();
    let eval = |t: f64| {
        let p = PolarPos {
            s: si.eval(t),
            phi: pi.eval(t),
        };
        cosh_dist_m1(p, target)
    };
    // parabolic refinement around the best sample
    let t0 = path.samples[i].t;
    let lo = if i > 0 { path.samples[i - 1].t } else { t0 };
    let hi = if i + 1 < path.samples.len() {
        path.samples[i + 1].t
    } else {
        t0
    };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..48 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if eval(m1) < eval(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let t_star = 0.5 * (a + b);
    let u = eval(t_star);
    (t_star, (1.0 + u).acosh())
}

/// Length of the (approximately geodesic) chart segment from x to y,
/// used for separations far below the shooting tolerance.
fn short_segment_length(model: &ManifoldModel, x: Point, y: Point) -> f64 {
    simpson(
        |t| {
            let zx = x.x + t * (y.x - x.x);
            let zy = x.y + t * (y.y - x.y);
            model
                .conformal_factor_disk(crate::hyperbolic::C64::new(zx, zy))
                .exp()
        },
        0.0,
        1.0,
        16,
    ) * ((y.x - x.x).powi(2) + (y.y - x.y).powi(2)).sqrt()
}

/// Shooting distance from an interior point to a (possibly far) target.
pub(crate) fn distance_to_polar(
    model: &ManifoldModel,
    x: Point,
    target: PolarPos,
    tol: f64,
) -> Result<f64> {
    let xp = PolarPos::of_point(x);
    let d_hyp = hyp_dist(xp, target);
    let psi_max = model
        .profile
        .map(|p| p.amplitude.abs())
        .unwrap_or(0.0);
    // chart direction of the hyperbolic geodesic toward the target
    let r_t = (0.5 * target.s).tanh();
    let zt = crate::hyperbolic::C64::from_polar(r_t, target.phi);
    let guess = {
        let w = (zt - x.z()) / (crate::hyperbolic::C64::ONE - x.z().conj() * zt);
        w.arg()
    };
    let ctrl = StepControl::with_tol(1e-11);
    let length = d_hyp * (psi_max.exp()) * 1.05 + 0.5;

    let miss_of = |theta: f64| -> (f64, f64, f64) {
        let v = UnitTangent::from_angle(model, x, theta).expect("interior base");
        let path = trace(model, ChartState::from_unit_tangent(&v), length, &ctrl, true);
        let (t_star, dist) = closest_approach(&path, target);
        // signed side of the target relative to the path direction
        let (si, pi) = path.interpolants();
        let s = si.eval(t_star);
        let phi = pi.eval(t_star);
        // frame components of the displacement toward the target
        let ds = target.s - s;
        let dphi = wrap_angle(target.phi - phi);
        let comp = (ds, s.sinh() * dphi);
        // path direction in the same frame
        let h = 1e-4;
        let dir = (
            (si.eval(t_star + h) - si.eval(t_star - h)) / (2.0 * h),
            s.sinh() * (pi.eval(t_star + h) - pi.eval(t_star - h)) / (2.0 * h),
        );
        let cross = dir.0 * comp.1 - dir.1 * comp.0;
        (cross, t_star, dist)
    };

    let mut th0 = guess;
    let (mut m0, t_star0, d0) = miss_of(th0);
    if d0 <= tol {
        return Ok(t_star0);
    }
    let mut th1 = guess + 1e-3;
    let mut best_res = d0;
    for it in 0..60 {
        let (m1, t_star, dist) = miss_of(th1);
        best_res = best_res.min(dist);
        if dist <= tol {
            return Ok(t_star);
        }
        let denom = m1 - m0;
        let step = if denom.abs() > 1e-300 {
            -m1 * (th1 - th0) / denom
        } else {
            0.0
        };
        th0 = th1;
        m0 = m1;
        th1 += step.clamp(-0.3, 0.3);
        if step.abs() < 1e-14 && it > 3 {
            break;
        }
    }
    Err(Error::SolverFailure {
        what: "distance shooting",
        residual: best_res,
    })
}

/// Distance between chart points. Symmetric nonnegative; closed form on
/// the constant model, shooting on the perturbed one.
pub fn distance(model: &ManifoldModel, x: Point, y: Point) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    if !model.is_perturbed() {
        return Ok(hyperbolic::disk_distance(x.z(), y.z()));
    }
    let d_hyp = hyperbolic::disk_distance(x.z(), y.z());
    if d_hyp < 1e-5 {
        return Ok(short_segment_length(model, x, y));
    }
    distance_to_polar(model, x, PolarPos::of_point(y), 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_closed_form() {
        let m = ManifoldModel::constant();
        let d = distance(&m, Point::ORIGIN, Point::new(0.5, 0.0).unwrap()).unwrap();
        assert!((d - 2.0 * 0.5f64.atanh()).abs() < 1e-14);
    }

    #[test]
    fn same_point_is_zero() {
        let m = ManifoldModel::perturbed_default();
        let p = Point::new(0.3, 0.2).unwrap();
        assert_eq!(distance(&m, p, p).unwrap(), 0.0);
    }

    #[test]
    fn zero_amplitude_matches_hyperbolic() {
        let m = ManifoldModel::perturbed_axial(0.0, 1.0).unwrap();
        for &(ax, ay, bx, by) in &[
            (0.0, 0.0, 0.5, 0.0),
            (0.2, 0.1, -0.4, 0.3),
            (-0.1, -0.6, 0.5, 0.4),
        ] {
            let a = Point::new(ax, ay).unwrap();
            let b = Point::new(bx, by).unwrap();
            let d = distance(&m, a, b).unwrap();
            let d0 = hyperbolic::disk_distance(a.z(), b.z());
            assert!((d - d0).abs() < 1e-6, "{d} vs {d0}");
        }
    }

    #[test]
    fn perturbed_symmetry_and_triangle() {
        let m = ManifoldModel::perturbed_default();
        let a = Point::new(0.1, 0.25).unwrap();
        let b = Point::new(-0.3, 0.05).unwrap();
        let c = Point::new(0.4, -0.2).unwrap();
        let dab = distance(&m, a, b).unwrap();
        let dba = distance(&m, b, a).unwrap();
        assert!((dab - dba).abs() < 1e-7, "{dab} vs {dba}");
        let dac = distance(&m, a, c).unwrap();
        let dcb = distance(&m, c, b).unwrap();
        assert!(dab <= dac + dcb + 1e-7);
    }

    #[test]
    fn perturbed_axis_length_is_conformal() {
        // Along the axis psi is constant, so distances scale by e^{psi(0)}.
        let m = ManifoldModel::perturbed_default();
        let amp = m.profile.unwrap().amplitude;
        let a = Point::ORIGIN;
        let b = Point::new(0.5, 0.0).unwrap();
        let d = distance(&m, a, b).unwrap();
        let expected = amp.exp() * 2.0 * 0.5f64.atanh();
        assert!((d - expected).abs() < 1e-7, "{d} vs {expected}");
    }
}
