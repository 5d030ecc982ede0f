//! Busemann cocycles, weighted partial products q, Gromov products and
//! additive cross ratios, all computed through the horizon-truncated
//! integral pipeline.
//!
//! The limit q_xi(x, y) is evaluated as
//!     u + int_0^T (f - 1) along the ray x -> xi
//!       - int_0^{T-u} (f - 1) along the ray y -> xi,
//! where u is the asymptotic offset b_xi(x) - b_xi(y). The offset is
//! read from the closest approach of the second ray to a far point of
//! the first, which avoids a distance solve and converges at the same
//! exponential rate as the tail of the integrals.

use crate::boundary::landing::landing;
use crate::boundary::rays::{direction_to_ideal, polar_direction_to_ideal, polar_state};
use crate::boundary::BoundaryPoint;
use crate::error::{Error, Result};
use crate::flow::{ray_path, ray_path_state, RayProfile};
use crate::models::{
    closest_approach, distance_to_polar, hyp_dist, ChartState, GeodesicPath, ManifoldModel, Point,
    PolarPos, UnitTangent,
};

#[derive(Debug, Clone, Copy)]
pub struct GromovParams {
    /// Horizon T of the truncated limits.
    pub horizon: f64,
    /// Anchor distance of the connector construction.
    pub t_far: f64,
    /// Riccati seeding length.
    pub seed: f64,
    /// Grid step of the curvature profile sweeps.
    pub prof_h: f64,
    /// Local error target of the geodesic tracer.
    pub geo_tol: f64,
}

impl Default for GromovParams {
    fn default() -> Self {
        GromovParams {
            horizon: crate::defaults::BOUNDARY_HORIZON,
            t_far: 18.0,
            seed: crate::defaults::PROFILE_SEED,
            prof_h: 0.02,
            geo_tol: 1e-9,
        }
    }
}

impl GromovParams {
    /// Cheaper settings used when tabulating products on a grid.
    pub(crate) fn table() -> Self {
        GromovParams {
            horizon: 16.0,
            ..Default::default()
        }
    }
}

/// A ray to the ideal boundary with its curvature profile.
pub(crate) struct RayData {
    pub path: GeodesicPath,
    pub profile: RayProfile,
    /// Position at t = horizon, the far matching point.
    pub far: PolarPos,
    /// A far state on the ray used to anchor connectors.
    pub anchor: ChartState,
}

pub(crate) fn ray_data(
    model: &ManifoldModel,
    base: Point,
    theta_chart: f64,
    params: &GromovParams,
) -> Result<RayData> {
    let dir = if base == Point::ORIGIN {
        theta_chart
    } else {
        let eu = landing(model).to_euclid(theta_chart);
        direction_to_ideal(model, base, eu)?
    };
    let v = UnitTangent::from_angle(model, base, dir)?;
    let path = ray_path(
        model,
        &v,
        params.seed,
        params.horizon + params.seed,
        params.geo_tol,
    );
    if let Some(at) = path.truncated {
        return Err(Error::Truncated {
            achieved: at,
            requested: params.horizon + params.seed,
        });
    }
    let profile = RayProfile::build(model, &path, params.prof_h);
    let (si, pi) = path.interpolants();
    let far = PolarPos {
        s: si.eval(params.horizon),
        phi: pi.eval(params.horizon),
    };
    let anchor_t = params.t_far.min(params.horizon + params.seed - 1.0);
    let anchor = ChartState::Polar([
        si.eval(anchor_t),
        pi.eval(anchor_t),
        (si.eval(anchor_t + 1e-4) - si.eval(anchor_t - 1e-4)) / 2e-4,
        (pi.eval(anchor_t + 1e-4) - pi.eval(anchor_t - 1e-4)) / 2e-4,
    ]);
    Ok(RayData {
        path,
        profile,
        far,
        anchor,
    })
}

/// Geodesic connecting two ideal points, traced from a far anchor on
/// the first ray and shot at the second landing angle.
pub(crate) fn connect_ideal(
    model: &ManifoldModel,
    ray_xi: &RayData,
    eu_eta: f64,
    params: &GromovParams,
) -> Result<(GeodesicPath, RayProfile)> {
    let ChartState::Polar([s, phi, ..]) = ray_xi.anchor else {
        return Err(Error::Degenerate("anchor not far enough".into()));
    };
    let omega = polar_direction_to_ideal(model, s, phi, eu_eta)?;
    let start = polar_state(model, s, phi, omega);
    let back = params.seed + (params.horizon - params.t_far).max(0.0) + 2.0;
    let fwd = params.t_far + params.horizon + params.seed + 4.0;
    let path = ray_path_state(model, start, back, fwd, params.geo_tol);
    if let Some(at) = path.truncated {
        return Err(Error::Truncated {
            achieved: at,
            requested: fwd,
        });
    }
    let profile = RayProfile::build(model, &path, params.prof_h);
    Ok((path, profile))
}

/// Parameter of the point of `path` closest to the chart origin.
fn closest_to_origin(path: &GeodesicPath) -> f64 {
    let mut best = (0usize, f64::INFINITY);
    for (i, smp) in path.samples.iter().enumerate() {
        if smp.s < best.1 {
            best = (i, smp.s);
        }
    }
    let (si, _) = path.interpolants();
    let i = best.0;
    let lo = path.samples[i.saturating_sub(1)].t;
    let hi = path.samples[(i + 1).min(path.samples.len() - 1)].t;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..40 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if si.eval(m1) < si.eval(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    0.5 * (a + b)
}

/// q_xi(x, y) and the asymptotic offset u for a ray pair sharing the
/// ideal endpoint: ray_x parameterized from x, the second ray given as a
/// path whose parameter tau_y marks y, oriented so that tau decreasing
/// runs toward xi.
fn q_from_ray_and_path(
    ray_x: &RayData,
    rho: &GeodesicPath,
    rho_prof: &RayProfile,
    tau_y: f64,
    toward_xi_negative: bool,
    horizon: f64,
) -> (f64, f64) {
    let (t_star, _dist) = closest_approach(rho, ray_x.far);
    let sigma = if toward_xi_negative {
        tau_y - t_star
    } else {
        t_star - tau_y
    };
    let u = horizon - sigma;
    let i_x = ray_x.profile.int_f_minus_1(0.0, horizon);
    let i_y = if toward_xi_negative {
        rho_prof.int_f_minus_1(tau_y - (horizon - u), tau_y)
    } else {
        rho_prof.int_f_minus_1(tau_y, tau_y + (horizon - u))
    };
    (u + i_x - i_y, u)
}

/// Gromov product (xi | eta)_base through the ray pipeline, with the
/// reference point on the connecting geodesic offset by `y_offset` from
/// the closest-to-origin point (any choice must agree; the offset is
/// exposed for the independence check).
pub(crate) fn gromov_product_with_offset(
    model: &ManifoldModel,
    base: Point,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
    y_offset: f64,
    params: &GromovParams,
) -> Result<f64> {
    if xi == eta {
        return Err(Error::Degenerate(
            "Gromov product needs distinct ideal points".into(),
        ));
    }
    let lm = landing(model);
    let ray1 = ray_data(model, base, xi.angle(), params)?;
    let ray2 = ray_data(model, base, eta.angle(), params)?;
    let (rho, rho_prof) = connect_ideal(model, &ray1, lm.to_euclid(eta.angle()), params)?;
    Ok(product_given_y(
        &ray1,
        &ray2,
        &rho,
        &rho_prof,
        closest_to_origin(&rho) + y_offset,
        params,
    ))
}

/// The product value for prepared rays and connector, with the
/// reference point at the connector's closest approach to the origin.
pub(crate) fn product_from_parts(
    ray1: &RayData,
    ray2: &RayData,
    rho: &GeodesicPath,
    rho_prof: &RayProfile,
    params: &GromovParams,
) -> f64 {
    product_given_y(ray1, ray2, rho, rho_prof, closest_to_origin(rho), params)
}

fn product_given_y(
    ray1: &RayData,
    ray2: &RayData,
    rho: &GeodesicPath,
    rho_prof: &RayProfile,
    tau_y: f64,
    params: &GromovParams,
) -> f64 {
    // rho runs from xi (tau small) toward eta (tau large)
    let (q_xi, _) = q_from_ray_and_path(ray1, rho, rho_prof, tau_y, true, params.horizon);
    let (q_eta, _) = q_from_ray_and_path(ray2, rho, rho_prof, tau_y, false, params.horizon);
    0.5 * (q_xi + q_eta)
}

/// Curvature-weighted Gromov product at a base point.
pub fn gromov_product(
    model: &ManifoldModel,
    base: Point,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
    params: &GromovParams,
) -> Result<f64> {
    gromov_product_with_offset(model, base, xi, eta, 0.0, params)
}

/// Busemann cocycle b_xi(y) - b_xi(x), computed as the horizon limit
/// lim_T [ d(y, gamma_{x,xi}(T)) - d(x, gamma_{x,xi}(T)) ].
pub fn busemann_cocycle(
    model: &ManifoldModel,
    xi: BoundaryPoint,
    x: Point,
    y: Point,
    horizon: f64,
) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    let dir = if x == Point::ORIGIN {
        xi.angle()
    } else {
        direction_to_ideal(model, x, landing(model).to_euclid(xi.angle()))?
    };
    let v = UnitTangent::from_angle(model, x, dir)?;
    let path = ray_path(model, &v, 0.0, horizon, 1e-10);
    if let Some(at) = path.truncated {
        return Err(Error::Truncated {
            achieved: at,
            requested: horizon,
        });
    }
    let (si, pi) = path.interpolants();
    let far = PolarPos {
        s: si.eval(horizon),
        phi: pi.eval(horizon),
    };
    let d = if model.is_perturbed() {
        distance_to_polar(model, y, far, 1e-8)?
    } else {
        hyp_dist(PolarPos::of_point(y), far)
    };
    Ok(d - horizon)
}

/// Weighted partial product q_xi(x, y): the limit of the difference of
/// f-integrals along the strongly asymptotic rays from x and y to xi.
pub fn q_value(
    model: &ManifoldModel,
    xi: BoundaryPoint,
    x: Point,
    y: Point,
    params: &GromovParams,
) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    let ray_x = ray_data(model, x, xi.angle(), params)?;
    // ray from y toward xi, extended so its profile covers the horizon
    let eu = landing(model).to_euclid(xi.angle());
    let dir = if y == Point::ORIGIN {
        xi.angle()
    } else {
        direction_to_ideal(model, y, eu)?
    };
    let vy = UnitTangent::from_angle(model, y, dir)?;
    let path_y = ray_path(
        model,
        &vy,
        params.seed,
        params.horizon + params.seed + 2.0,
        params.geo_tol,
    );
    let prof_y = RayProfile::build(model, &path_y, params.prof_h);
    let (q, _u) = q_from_ray_and_path(&ray_x, &path_y, &prof_y, 0.0, false, params.horizon);
    Ok(q)
}

/// The geodesic connecting two ideal boundary points.
#[derive(Debug, Clone)]
pub struct BoundaryGeodesic {
    pub endpoints: (BoundaryPoint, BoundaryPoint),
    /// (arclength, chart point) samples; t = 0 at the point closest to
    /// the origin, t increasing toward the second endpoint.
    pub samples: Vec<(f64, Point)>,
}

pub fn connect_boundary_points(
    model: &ManifoldModel,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
) -> Result<BoundaryGeodesic> {
    if xi == eta {
        return Err(Error::Degenerate("coincident ideal points".into()));
    }
    let params = GromovParams::default();
    let lm = landing(model);
    let ray1 = ray_data(model, Point::ORIGIN, xi.angle(), &params)?;
    let (rho, _prof) = connect_ideal(model, &ray1, lm.to_euclid(eta.angle()), &params)?;
    let tau_y = closest_to_origin(&rho);
    let mut samples = Vec::new();
    for smp in &rho.samples {
        if smp.s <= 18.0 {
            let r = (0.5 * smp.s).tanh();
            samples.push((
                smp.t - tau_y,
                Point::new(r * smp.phi.cos(), r * smp.phi.sin())?,
            ));
        }
    }
    // rho runs from xi toward eta; reverse the anchor order so that t
    // increases from xi to eta (it already does).
    Ok(BoundaryGeodesic {
        endpoints: (xi, eta),
        samples,
    })
}

/// Additive cross ratio [xi1, xi2, xi3, xi4]_base.
#[derive(Debug, Clone, Copy)]
pub struct CrossRatio {
    pub value: f64,
    /// Set when the value 0 is forced analytically by a repeated entry
    /// (terms cancel pairwise) rather than computed.
    pub forced_zero: bool,
}

pub fn cross_ratio_add(
    model: &ManifoldModel,
    base: Point,
    pts: [BoundaryPoint; 4],
    params: &GromovParams,
) -> Result<CrossRatio> {
    let [x1, x2, x3, x4] = pts;
    // pairs entering the formula: (1,3), (2,4), (1,4), (2,3)
    let diverging = [(x1, x3), (x2, x4), (x1, x4), (x2, x3)];
    if x1 == x2 || x3 == x4 {
        if diverging.iter().any(|(a, b)| a == b) {
            return Err(Error::Domain(
                "cross ratio needs the diagonal pairs distinct".into(),
            ));
        }
        return Ok(CrossRatio {
            value: 0.0,
            forced_zero: true,
        });
    }
    if diverging.iter().any(|(a, b)| a == b) {
        return Err(Error::Domain(
            "cross ratio diverges for coincident entries".into(),
        ));
    }
    let p13 = gromov_product(model, base, x1, x3, params)?;
    let p24 = gromov_product(model, base, x2, x4, params)?;
    let p14 = gromov_product(model, base, x1, x4, params)?;
    let p23 = gromov_product(model, base, x2, x3, params)?;
    Ok(CrossRatio {
        value: p13 + p24 - p14 - p23,
        forced_zero: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic;
    use std::f64::consts::PI;

    #[test]
    fn busemann_closed_form_at_origin() {
        let m = ManifoldModel::constant();
        let xi = BoundaryPoint::new(0.0);
        let b = busemann_cocycle(&m, xi, Point::ORIGIN, Point::new(0.5, 0.0).unwrap(), 20.0)
            .unwrap();
        // y halfway toward xi: b_xi(y) - b_xi(0) = log(1/3)
        assert!((b - (1.0f64 / 3.0).ln()).abs() < 1e-6, "b = {b}");
        let same =
            busemann_cocycle(&m, xi, Point::ORIGIN, Point::ORIGIN, 20.0).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn busemann_along_ray_is_minus_arclength() {
        let m = ManifoldModel::constant();
        let xi = BoundaryPoint::new(0.7);
        let x = Point::new(0.1, 0.2).unwrap();
        let dir = hyperbolic::ray_direction(x.z(), 0.7);
        let v = UnitTangent::from_angle(&m, x, dir).unwrap();
        let s = 0.9;
        let y = crate::models::geodesic_evolve(&m, &v, s, &Default::default())
            .unwrap()
            .base;
        let b = busemann_cocycle(&m, xi, x, y, 20.0).unwrap();
        assert!((b + s).abs() < 1e-4, "b = {b}, expected {}", -s);
    }

    #[test]
    fn busemann_cocycle_identity() {
        let m = ManifoldModel::constant();
        let xi = BoundaryPoint::new(2.1);
        let x = Point::new(0.2, -0.1).unwrap();
        let y = Point::new(-0.3, 0.25).unwrap();
        let z = Point::new(0.05, 0.4).unwrap();
        let bxy = busemann_cocycle(&m, xi, x, y, 20.0).unwrap();
        let byz = busemann_cocycle(&m, xi, y, z, 20.0).unwrap();
        let bxz = busemann_cocycle(&m, xi, x, z, 20.0).unwrap();
        assert!((bxy + byz - bxz).abs() < 1e-5);
    }

    #[test]
    fn q_reduces_to_busemann_on_constant_model() {
        let m = ManifoldModel::constant();
        let xi = BoundaryPoint::new(0.0);
        let y = Point::new(0.5, 0.0).unwrap();
        let q = q_value(&m, xi, Point::ORIGIN, y, &GromovParams::default()).unwrap();
        assert!((q - 3.0f64.ln()).abs() < 1e-4, "q = {q}");
        // antisymmetry
        let qr = q_value(&m, xi, y, Point::ORIGIN, &GromovParams::default()).unwrap();
        assert!((q + qr).abs() < 1e-4, "{q} vs {qr}");
    }

    #[test]
    fn gromov_product_closed_form() {
        let m = ManifoldModel::constant();
        let p = gromov_product(
            &m,
            Point::ORIGIN,
            BoundaryPoint::new(0.0),
            BoundaryPoint::new(PI / 2.0),
            &GromovParams::default(),
        )
        .unwrap();
        let expected = -(PI / 4.0).sin().ln();
        assert!((p - expected).abs() < 1e-4, "{p} vs {expected}");
        let diam = gromov_product(
            &m,
            Point::ORIGIN,
            BoundaryPoint::new(0.0),
            BoundaryPoint::new(PI),
            &GromovParams::default(),
        )
        .unwrap();
        assert!(diam.abs() < 1e-4, "antipodal product {diam}");
    }

    #[test]
    fn gromov_product_y_independence() {
        let m = ManifoldModel::constant();
        let params = GromovParams::default();
        let mut vals = Vec::new();
        for off in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            vals.push(
                gromov_product_with_offset(
                    &m,
                    Point::ORIGIN,
                    BoundaryPoint::new(0.4),
                    BoundaryPoint::new(2.0),
                    off,
                    &params,
                )
                .unwrap(),
            );
        }
        let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
            - vals.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-4, "spread {spread}: {vals:?}");
    }

    #[test]
    fn connect_diameter_and_quarter_arc() {
        let m = ManifoldModel::constant();
        let g = connect_boundary_points(&m, BoundaryPoint::new(0.0), BoundaryPoint::new(PI))
            .unwrap();
        for (_, p) in &g.samples {
            assert!(p.y.abs() < 1e-7, "diameter sample off axis: {p:?}");
        }
        let arc = connect_boundary_points(&m, BoundaryPoint::new(0.0), BoundaryPoint::new(PI / 2.0))
            .unwrap();
        // closed form: circle centered 1 + i with radius 1
        for (_, p) in arc.samples.iter().step_by(7) {
            let d = ((p.x - 1.0).powi(2) + (p.y - 1.0).powi(2)).sqrt();
            assert!((d - 1.0).abs() < 1e-6, "arc sample {p:?} off circle by {d}");
        }
        assert!(connect_boundary_points(&m, BoundaryPoint::new(1.0), BoundaryPoint::new(1.0)).is_err());
    }

    #[test]
    fn cross_ratio_degenerate_guard() {
        let m = ManifoldModel::constant();
        let params = GromovParams::default();
        let a = BoundaryPoint::new(0.0);
        let b = BoundaryPoint::new(1.0);
        let c = BoundaryPoint::new(2.0);
        let r = cross_ratio_add(&m, Point::ORIGIN, [a, a, b, c], &params).unwrap();
        assert!(r.forced_zero && r.value == 0.0);
        assert!(cross_ratio_add(&m, Point::ORIGIN, [a, b, a, c], &params).is_err());
    }
}
