//! Induced boundary actions and the boundary derivative |g'|.

use crate::boundary::landing::landing;
use crate::boundary::quasimetric::QuasiMetric;
use crate::boundary::BoundaryPoint;
use crate::error::{Error, Result};
use crate::hyperbolic::wrap_angle;
use crate::models::{trace, ChartState, IsometryElement, ManifoldModel, Point, UnitTangent};
use crate::num::ode::StepControl;

/// Boundary action through the chart: pull the direction to its
/// Euclidean landing angle, apply the Moebius circle map, pull back.
/// This is the exact conjugated circle action; `boundary_map` below is
/// the far-point push-through it is validated against.
pub fn boundary_action(model: &ManifoldModel, g: &IsometryElement, theta: f64) -> Result<f64> {
    if model.is_perturbed() && !g.axis_compatible() {
        return Err(Error::InvalidIsometry(
            "element does not preserve the perturbation axis".into(),
        ));
    }
    let lm = landing(model);
    Ok(lm.from_euclid(g.circle_map(lm.to_euclid(theta))))
}

/// Angle derivative of the boundary action.
pub fn boundary_action_derivative(
    model: &ManifoldModel,
    g: &IsometryElement,
    theta: f64,
) -> Result<f64> {
    if model.is_perturbed() && !g.axis_compatible() {
        return Err(Error::InvalidIsometry(
            "element does not preserve the perturbation axis".into(),
        ));
    }
    let lm = landing(model);
    let eu = lm.to_euclid(theta);
    Ok(lm.from_euclid_deriv(g.circle_map(eu)) * g.circle_derivative(eu) * lm.to_euclid_deriv(theta))
}

/// Push a far geodesic point gamma_xi(T) through g and read the
/// direction from the basepoint.
pub fn boundary_map(
    model: &ManifoldModel,
    g: &IsometryElement,
    xi: BoundaryPoint,
) -> Result<BoundaryPoint> {
    if model.is_perturbed() && !g.axis_compatible() {
        return Err(Error::InvalidIsometry(
            "element does not preserve the perturbation axis".into(),
        ));
    }
    // keep the image point at least the default horizon away from the
    // basepoint so the direction read-off error stays ~ e^{-T}
    let g_inv_origin = g.inverse().apply_z(crate::hyperbolic::C64::ZERO);
    let shift = 2.0 * g_inv_origin.abs().atanh();
    let horizon = crate::defaults::BOUNDARY_HORIZON + shift;
    let v = UnitTangent::from_angle(model, Point::ORIGIN, xi.angle())?;
    let path = trace(
        model,
        ChartState::from_unit_tangent(&v),
        horizon,
        &StepControl::with_tol(1e-10),
        false,
    );
    let (s, phi) = match path.end {
        ChartState::Polar([s, phi, ..]) => (s, phi),
        ChartState::Disk([x, y, ..]) => {
            let r = (x * x + y * y).sqrt();
            (2.0 * r.atanh(), y.atan2(x))
        }
    };
    // apply g to the far point in the disk chart (angles stay accurate)
    let r = (0.5 * s).tanh().min(1.0 - 1e-16);
    let image = g.apply_z(crate::hyperbolic::C64::from_polar(r, phi));
    Ok(BoundaryPoint::new(landing(model).from_euclid(image.arg())))
}

/// Boundary derivative |g'| of the induced action with respect to the
/// quasimetric, through the cross-ratio limit formula
/// |g'|(xi) = [d(g xi, g v)/d(xi, v)] [d(g xi, g u)/d(xi, u)]
///            [d(u, v)/(d(g u, g v))].
#[derive(Debug, Clone, Copy)]
pub struct Derivative {
    pub value: f64,
    /// Set when an auxiliary point is close enough to xi to degrade
    /// conditioning.
    pub conditioning_warning: bool,
}

pub fn boundary_derivative(
    q: &QuasiMetric,
    g: &IsometryElement,
    xi: BoundaryPoint,
    aux: Option<(BoundaryPoint, BoundaryPoint)>,
) -> Result<Derivative> {
    let (u, v) = aux.unwrap_or((
        BoundaryPoint::new(xi.angle() + crate::defaults::AUX_OFFSET),
        BoundaryPoint::new(xi.angle() - crate::defaults::AUX_OFFSET),
    ));
    if u == v || u == xi || v == xi {
        return Err(Error::Degenerate(
            "auxiliary boundary points must be distinct from xi and each other".into(),
        ));
    }
    let sep = u.separation(&xi).min(v.separation(&xi)).min(u.separation(&v));
    let conditioning_warning = sep < 0.2;
    let gxi = boundary_action(&q.model, g, xi.angle())?;
    let gu = boundary_action(&q.model, g, u.angle())?;
    let gv = boundary_action(&q.model, g, v.angle())?;
    let (gxi, gu, gv) = (
        BoundaryPoint::new(gxi),
        BoundaryPoint::new(gu),
        BoundaryPoint::new(gv),
    );
    let value = (q.delta(gxi, gv) / q.delta(xi, v))
        * (q.delta(gxi, gu) / q.delta(xi, u))
        * (q.delta(u, v) / q.delta(gu, gv));
    Ok(Derivative {
        value,
        conditioning_warning,
    })
}

/// Multiplicative cross ratio Cr = d13 d24 / (d14 d23).
pub fn cross_ratio_mult(q: &QuasiMetric, pts: [BoundaryPoint; 4]) -> Result<f64> {
    let [x1, x2, x3, x4] = pts;
    for (a, b) in [(x1, x3), (x2, x4), (x1, x4), (x2, x3)] {
        if a == b {
            return Err(Error::Domain("multiplicative cross ratio needs the four diagonal pairs distinct".into()));
        }
    }
    Ok(q.delta(x1, x3) * q.delta(x2, x4) / (q.delta(x1, x4) * q.delta(x2, x3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rotation_acts_by_rotation() {
        let m = ManifoldModel::constant();
        let g = IsometryElement::rotation(0.8);
        let out = boundary_map(&m, &g, BoundaryPoint::new(0.5)).unwrap();
        assert!(wrap_angle(out.angle() - 1.3).abs() < 1e-9);
    }

    #[test]
    fn loxodromic_fixes_its_axis_points() {
        let m = ManifoldModel::constant();
        let g = IsometryElement::loxodromic_axis(1.0);
        let fix0 = boundary_map(&m, &g, BoundaryPoint::new(0.0)).unwrap();
        let fixpi = boundary_map(&m, &g, BoundaryPoint::new(PI)).unwrap();
        assert!(wrap_angle(fix0.angle()).abs() < 1e-8);
        assert!(wrap_angle(fixpi.angle() - PI).abs() < 1e-8);
    }

    #[test]
    fn push_through_matches_moebius_action() {
        let m = ManifoldModel::constant();
        let g = IsometryElement::loxodromic_axis(0.9)
            .compose(&IsometryElement::rotation(0.37));
        for k in 0..8 {
            let th = 0.77 * k as f64;
            let got = boundary_map(&m, &g, BoundaryPoint::new(th)).unwrap();
            let want = g.circle_map(th);
            assert!(
                wrap_angle(got.angle() - want).abs() < 1e-8,
                "theta {th}: {} vs {want}",
                got.angle()
            );
        }
    }

    #[test]
    fn boundary_map_is_functorial() {
        let m = ManifoldModel::constant();
        let a = IsometryElement::rotation(1.1);
        let b = IsometryElement::loxodromic_axis(0.6);
        let ab = a.compose(&b);
        let xi = BoundaryPoint::new(2.3);
        let lhs = boundary_map(&m, &ab, xi).unwrap();
        let rhs = boundary_map(&m, &a, boundary_map(&m, &b, xi).unwrap()).unwrap();
        assert!(wrap_angle(lhs.angle() - rhs.angle()).abs() < 1e-7);
    }

    #[test]
    fn rotation_derivative_is_one() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 1.0).unwrap();
        let g = IsometryElement::rotation(1.3);
        for k in 0..6 {
            let d = boundary_derivative(&q, &g, BoundaryPoint::new(1.1 * k as f64), None).unwrap();
            assert!((d.value - 1.0).abs() < 1e-8, "{}", d.value);
            assert!(!d.conditioning_warning);
        }
    }

    #[test]
    fn loxodromic_derivative_at_attracting_point() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 1.0).unwrap();
        let g = IsometryElement::loxodromic_axis(1.0);
        let d = boundary_derivative(&q, &g, BoundaryPoint::new(0.0), None).unwrap();
        assert!((d.value - (-1.0f64).exp()).abs() < 1e-8, "{}", d.value);
    }

    #[test]
    fn derivative_identity_on_random_pairs() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 1.0).unwrap();
        let g = IsometryElement::loxodromic_axis(0.8)
            .compose(&IsometryElement::rotation(0.5));
        for k in 0..12 {
            let xi = BoundaryPoint::new(0.6 * k as f64 + 0.05);
            let eta = BoundaryPoint::new(0.45 * k as f64 + 2.0);
            if xi == eta {
                continue;
            }
            let gxi = BoundaryPoint::new(boundary_action(&m, &g, xi.angle()).unwrap());
            let geta = BoundaryPoint::new(boundary_action(&m, &g, eta.angle()).unwrap());
            let lhs = q.delta(gxi, geta).powi(2);
            let dx = boundary_derivative(&q, &g, xi, None).unwrap().value;
            let de = boundary_derivative(&q, &g, eta, None).unwrap().value;
            let rhs = dx * de * q.delta(xi, eta).powi(2);
            assert!(
                ((lhs - rhs) / rhs).abs() < 1e-8,
                "identity residual {} at k={k}",
                (lhs - rhs) / rhs
            );
        }
    }

    #[test]
    fn aux_conditioning_warning() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 1.0).unwrap();
        let g = IsometryElement::rotation(0.2);
        let xi = BoundaryPoint::new(0.0);
        let aux = (BoundaryPoint::new(0.05), BoundaryPoint::new(2.0));
        let d = boundary_derivative(&q, &g, xi, Some(aux)).unwrap();
        assert!(d.conditioning_warning);
        assert!(boundary_derivative(&q, &g, xi, Some((xi, aux.1))).is_err());
    }
}
