//! Orientation-preserving isometries as 2x2 real matrices mod sign.
//!
//! A matrix g in SL(2, R) acts on the upper half plane by fractional
//! linear maps; conjugating with the Cayley transform gives the disk
//! action z -> (alpha z + beta) / (conj(beta) z + conj(alpha)) with
//! alpha = (a + d)/2 + i (b - c)/2 and beta = (a - d)/2 - i (b + c)/2.
//! The imaginary axis of the half plane maps to the diameter (-1, 1),
//! which is the perturbation axis of the second model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{wrap_angle, C64};
use crate::models::{ManifoldModel, Point, UnitTangent};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryElement {
    m: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IsometryClass {
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// Output of `isometry_classify`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Classification {
    pub class: IsometryClass,
    pub translation_length: f64,
    /// Boundary fixed points as Euclidean circle angles
    /// (two for loxodromic, one for parabolic, none for elliptic).
    pub boundary_fixed_points: [Option<f64>; 2],
    pub attracting_fixed_point: Option<f64>,
}

impl IsometryElement {
    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidIsometry(format!(
                "determinant {det} is not 1 within 1e-12"
            )));
        }
        let mut g = IsometryElement { m };
        g.canonicalize();
        Ok(g)
    }

    /// Fix the sign ambiguity of the matrix representative.
    fn canonicalize(&mut self) {
        let tr = self.m[0][0] + self.m[1][1];
        let flip = if tr.abs() > 1e-12 {
            tr < 0.0
        } else {
            let lead = [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
                .into_iter()
                .find(|v| v.abs() > 1e-12)
                .unwrap_or(1.0);
            lead < 0.0
        };
        if flip {
            for row in &mut self.m {
                for v in row {
                    *v = -*v;
                }
            }
        }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn identity() -> Self {
        IsometryElement {
            m: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    /// Rotation by `angle` about the chart origin.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        IsometryElement {
            m: [[c, s], [-s, c]],
        }
    }

    /// Loxodromic translation of length `l > 0` along the axis (-1, 1),
    /// attracting fixed point at +1.
    pub fn loxodromic_axis(l: f64) -> Self {
        let e = (0.5 * l).exp();
        IsometryElement {
            m: [[e, 0.0], [0.0, 1.0 / e]],
        }
    }

    /// Loxodromic with prescribed boundary fixed points (Euclidean
    /// angles) and translation length; attracting at `attracting_angle`.
    pub fn loxodromic(attracting_angle: f64, repelling_angle: f64, l: f64) -> Result<Self> {
        if wrap_angle(attracting_angle - repelling_angle).abs() < 1e-12 {
            return Err(Error::InvalidIsometry("coincident fixed points".into()));
        }
        // Conjugate the axis translation by a Moebius map sending
        // (+1, -1) to the requested fixed points.
        let g0 = IsometryElement::loxodromic_axis(l);
        let h = IsometryElement::circle_mapper(attracting_angle, repelling_angle);
        Ok(h.compose(&g0).compose(&h.inverse()))
    }

    /// A disk isometry sending +1 -> angle_p and -1 -> angle_m.
    ///
    /// Built from a vertical translation v_u(z) = (z + iu)/(1 - iu z),
    /// which moves +1 to angle 2 atan(u) and -1 to angle pi - 2 atan(u),
    /// followed by a rotation. The vertical translation only reaches
    /// separations in (0, pi), so the other ordering is handled by
    /// composing with the half turn.
    fn circle_mapper(angle_p: f64, angle_m: f64) -> IsometryElement {
        let d = wrap_angle(angle_p - angle_m);
        if (d.abs() - std::f64::consts::PI).abs() < 1e-15 {
            // antipodal pair: a rotation suffices
            return IsometryElement::rotation(angle_p);
        }
        if d < 0.0 {
            let c = 0.25 * (d + std::f64::consts::PI);
            let u = c.tan();
            let vertical = IsometryElement::su11_to_matrix(C64::ONE, C64::new(0.0, u));
            IsometryElement::rotation(angle_p - 2.0 * c).compose(&vertical)
        } else {
            // send -1 -> angle_p, +1 -> angle_m, then pre-rotate by pi
            let h = IsometryElement::circle_mapper(angle_m, angle_p);
            h.compose(&IsometryElement::rotation(std::f64::consts::PI))
        }
    }

    /// Build the SL(2,R) matrix from SU(1,1) data (up to normalization).
    fn su11_to_matrix(alpha: C64, beta: C64) -> IsometryElement {
        // invert the Cayley conjugation formulas
        let norm = (alpha.norm_sq() - beta.norm_sq()).sqrt();
        let (alpha, beta) = (
            C64::new(alpha.re / norm, alpha.im / norm),
            C64::new(beta.re / norm, beta.im / norm),
        );
        let a = alpha.re + beta.re;
        let d = alpha.re - beta.re;
        let b = alpha.im - beta.im;
        let c = -(alpha.im + beta.im);
        IsometryElement {
            m: [[a, b], [c, d]],
        }
    }

    /// Disk-model coefficients (alpha, beta).
    pub fn su11(&self) -> (C64, C64) {
        let [[a, b], [c, d]] = self.m;
        (
            C64::new(0.5 * (a + d), 0.5 * (b - c)),
            C64::new(0.5 * (a - d), -0.5 * (b + c)),
        )
    }

    pub fn compose(&self, other: &IsometryElement) -> IsometryElement {
        let (x, y) = (&self.m, &other.m);
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        let mut g = IsometryElement { m };
        g.canonicalize();
        g
    }

    pub fn inverse(&self) -> IsometryElement {
        let [[a, b], [c, d]] = self.m;
        let mut g = IsometryElement {
            m: [[d, -b], [-c, a]],
        };
        g.canonicalize();
        g
    }

    /// Integer power.
    pub fn pow(&self, k: i32) -> IsometryElement {
        if k == 0 {
            return IsometryElement::identity();
        }
        let base = if k > 0 { *self } else { self.inverse() };
        let mut acc = base;
        for _ in 1..k.abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// Moebius action on the disk chart.
    pub fn apply_z(&self, z: C64) -> C64 {
        let (al, be) = self.su11();
        (al * z + be) / (be.conj() * z + al.conj())
    }

    /// Complex derivative of the disk action.
    pub fn derivative_z(&self, z: C64) -> C64 {
        let (al, be) = self.su11();
        let den = be.conj() * z + al.conj();
        C64::ONE / (den * den)
    }

    /// Induced circle map on Euclidean boundary angles.
    pub fn circle_map(&self, angle: f64) -> f64 {
        self.apply_z(C64::from_polar(1.0, angle)).arg()
    }

    /// Derivative of the circle map (positive).
    pub fn circle_derivative(&self, angle: f64) -> f64 {
        let (al, be) = self.su11();
        let den = be.conj() * C64::from_polar(1.0, angle) + al.conj();
        1.0 / den.norm_sq()
    }

    /// True when the element preserves the axis (-1, 1) of the perturbed
    /// model: diagonal matrices and half-turns about axis points.
    pub fn axis_compatible(&self) -> bool {
        let [[a, b], [c, d]] = self.m;
        let tol = 1e-12;
        (b.abs() < tol && c.abs() < tol) || (a.abs() < tol && d.abs() < tol)
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }
}

/// Classify by |trace|: < 2 elliptic, = 2 parabolic, > 2 loxodromic
/// (with translation length 2 arccosh(|tr|/2)).
pub fn isometry_classify(g: &IsometryElement) -> Classification {
    let tr = g.trace().abs();
    let tol = 1e-9;
    if tr > 2.0 + tol {
        let l = 2.0 * (0.5 * tr).acosh();
        let (al, be) = g.su11();
        // fixed points of conj(beta) z^2 + (conj(alpha) - alpha) z - beta = 0
        let root = ((0.5 * g.trace()).powi(2) - 1.0).sqrt();
        let bb = be.conj();
        let num1 = C64::new(0.0, al.im) + C64::new(root, 0.0);
        let num2 = C64::new(0.0, al.im) - C64::new(root, 0.0);
        let (z1, z2) = (num1 / bb, num2 / bb);
        let (a1, a2) = (z1.arg(), z2.arg());
        let d1 = g.circle_derivative(a1);
        let (attract, repel) = if d1 < 1.0 { (a1, a2) } else { (a2, a1) };
        Classification {
            class: IsometryClass::Loxodromic,
            translation_length: l,
            boundary_fixed_points: [Some(repel), Some(attract)],
            attracting_fixed_point: Some(attract),
        }
    } else if tr > 2.0 - tol {
        // parabolic (or identity, which we report as elliptic)
        let (al, be) = g.su11();
        if be.abs() < 1e-12 {
            return Classification {
                class: IsometryClass::Elliptic,
                translation_length: 0.0,
                boundary_fixed_points: [None, None],
                attracting_fixed_point: None,
            };
        }
        let z = C64::new(0.0, al.im) / be.conj();
        Classification {
            class: IsometryClass::Parabolic,
            translation_length: 0.0,
            boundary_fixed_points: [Some(z.arg()), None],
            attracting_fixed_point: None,
        }
    } else {
        Classification {
            class: IsometryClass::Elliptic,
            translation_length: 0.0,
            boundary_fixed_points: [None, None],
            attracting_fixed_point: None,
        }
    }
}

/// Apply an isometry to a chart point, checking model compatibility.
pub fn isometry_apply(model: &ManifoldModel, g: &IsometryElement, p: Point) -> Result<Point> {
    if model.is_perturbed() && !g.axis_compatible() {
        return Err(Error::InvalidIsometry(
            "element does not preserve the perturbation axis".into(),
        ));
    }
    Point::from_c(g.apply_z(p.z()))
}

/// Apply an isometry to a unit tangent via the differential of the
/// Moebius action.
pub fn isometry_apply_tangent(
    model: &ManifoldModel,
    g: &IsometryElement,
    v: &UnitTangent,
) -> Result<UnitTangent> {
    if model.is_perturbed() && !g.axis_compatible() {
        return Err(Error::InvalidIsometry(
            "element does not preserve the perturbation axis".into(),
        ));
    }
    let z = v.base.z();
    let dz = g.derivative_z(z);
    let w = dz * C64::new(v.vx, v.vy);
    UnitTangent::new(model, Point::from_c(g.apply_z(z))?, w.re, w.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rotation_moves_half_point() {
        let m = ManifoldModel::constant();
        let g = IsometryElement::rotation(PI / 2.0);
        let p = isometry_apply(&m, &g, Point::new(0.5, 0.0).unwrap()).unwrap();
        assert!((p.x).abs() < 1e-14 && (p.y - 0.5).abs() < 1e-14);
    }

    #[test]
    fn identity_fixes_tangents() {
        let m = ManifoldModel::constant();
        let v = UnitTangent::from_angle(&m, Point::new(0.2, -0.1).unwrap(), 0.8).unwrap();
        let w = isometry_apply_tangent(&m, &IsometryElement::identity(), &v).unwrap();
        assert!((w.vx - v.vx).abs() < 1e-15 && (w.vy - v.vy).abs() < 1e-15);
    }

    #[test]
    fn axis_loxodromic_moves_origin() {
        let m = ManifoldModel::constant();
        let g = IsometryElement::loxodromic_axis(1.0);
        let p = isometry_apply(&m, &g, Point::ORIGIN).unwrap();
        assert!((p.x - 0.5f64.tanh()).abs() < 1e-14, "x = {}", p.x);
        assert!(p.y.abs() < 1e-15);
    }

    #[test]
    fn classify_by_trace() {
        let g = IsometryElement::new([[2.0f64.cosh().sqrt(), 0.0], [0.0, 1.0 / 2.0f64.cosh().sqrt()]])
            .unwrap();
        // trace = sqrt(cosh 2) + 1/sqrt(cosh 2); just check the canonical one:
        let gl = IsometryElement::loxodromic_axis(1.0);
        let c = isometry_classify(&gl);
        assert_eq!(c.class, IsometryClass::Loxodromic);
        assert!((c.translation_length - 1.0).abs() < 1e-12);
        assert!((c.attracting_fixed_point.unwrap()).abs() < 1e-12);
        let _ = g;
        let e = isometry_classify(&IsometryElement::identity());
        assert_eq!(e.class, IsometryClass::Elliptic);
        assert_eq!(e.translation_length, 0.0);
    }

    #[test]
    fn attracting_derivative_is_exp_minus_length() {
        let gl = IsometryElement::loxodromic_axis(1.0);
        let d = gl.circle_derivative(0.0);
        assert!((d - (-1.0f64).exp()).abs() < 1e-12, "d = {d}");
    }

    #[test]
    fn general_loxodromic_has_requested_fixed_points() {
        let g = IsometryElement::loxodromic(0.9, -1.7, 0.8).unwrap();
        let c = isometry_classify(&g);
        assert_eq!(c.class, IsometryClass::Loxodromic);
        assert!((c.translation_length - 0.8).abs() < 1e-9);
        assert!(wrap_angle(c.attracting_fixed_point.unwrap() - 0.9).abs() < 1e-9);
        assert!(wrap_angle(c.boundary_fixed_points[0].unwrap() + 1.7).abs() < 1e-9);
    }

    #[test]
    fn composition_is_matrix_product() {
        let a = IsometryElement::rotation(0.4);
        let b = IsometryElement::loxodromic_axis(0.7);
        let ab = a.compose(&b);
        let z = C64::new(0.1, -0.3);
        let lhs = ab.apply_z(z);
        let rhs = a.apply_z(b.apply_z(z));
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn axis_compatibility() {
        assert!(IsometryElement::loxodromic_axis(0.5).axis_compatible());
        assert!(IsometryElement::rotation(PI).axis_compatible());
        assert!(!IsometryElement::rotation(0.3).axis_compatible());
        let m = ManifoldModel::perturbed_default();
        let bad = IsometryElement::rotation(0.3);
        assert!(isometry_apply(&m, &bad, Point::ORIGIN).is_err());
    }

    #[test]
    fn perturbed_isometry_preserves_distance() {
        use crate::models::distance::distance;
        let m = ManifoldModel::perturbed_default();
        let g = IsometryElement::loxodromic_axis(0.6);
        let a = Point::new(0.15, 0.2).unwrap();
        let b = Point::new(-0.2, 0.35).unwrap();
        let d0 = distance(&m, a, b).unwrap();
        let d1 = distance(
            &m,
            isometry_apply(&m, &g, a).unwrap(),
            isometry_apply(&m, &g, b).unwrap(),
        )
        .unwrap();
        assert!((d0 - d1).abs() < 1e-6, "{d0} vs {d1}");
    }
}
