//! Ray construction and direction shooting toward ideal points.

use crate::error::{Error, Result};
use crate::hyperbolic::{self, wrap_angle};
use crate::models::{trace, ChartState, ManifoldModel, Point, UnitTangent};
use crate::num::ode::StepControl;

fn shoot_ctrl() -> StepControl {
    StepControl {
        tol: 1e-9,
        h_max: 0.25,
        ..Default::default()
    }
}

/// Euclidean landing angle of the ray from a chart state, read after
/// tracing far enough that the remaining angular drift is negligible.
pub(crate) fn landing_angle(model: &ManifoldModel, start: ChartState, reach: f64) -> f64 {
    let path = trace(model, start, reach, &shoot_ctrl(), false);
    match path.end {
        ChartState::Polar([_, phi, ..]) => wrap_angle(phi),
        ChartState::Disk([x, y, ..]) => y.atan2(x),
    }
}

/// Initial chart direction at p of the ray landing at the given
/// Euclidean boundary angle. Closed form on the constant model, secant
/// iteration on the landing angle otherwise.
pub(crate) fn direction_to_ideal(model: &ManifoldModel, p: Point, eu_target: f64) -> Result<f64> {
    let guess = hyperbolic::ray_direction(p.z(), eu_target);
    if !model.is_perturbed() {
        return Ok(guess);
    }
    let reach = crate::defaults::LANDING_LENGTH + 2.0 * p.norm().atanh();
    let miss = |dir: f64| -> f64 {
        let v = UnitTangent::from_angle(model, p, dir).expect("interior point");
        wrap_angle(landing_angle(model, ChartState::from_unit_tangent(&v), reach) - eu_target)
    };
    secant_on_angle(guess, miss, 1e-11)
}

/// Direction (frame angle omega relative to the outward radial
/// direction) at a far polar state aiming at an ideal point.
pub(crate) fn polar_direction_to_ideal(
    model: &ManifoldModel,
    s: f64,
    phi: f64,
    eu_target: f64,
) -> Result<f64> {
    // hyperbolic guess via the disk chart (adequate even far out)
    let r = (0.5 * s).tanh().min(1.0 - 1e-16);
    let z = hyperbolic::C64::from_polar(r, phi);
    let guess = wrap_angle(hyperbolic::ray_direction(z, eu_target) - phi);
    if !model.is_perturbed() {
        return Ok(guess);
    }
    let reach = crate::defaults::LANDING_LENGTH + s + 2.0;
    let miss = |omega: f64| -> f64 {
        let st = polar_state(model, s, phi, omega);
        wrap_angle(landing_angle(model, st, reach) - eu_target)
    };
    secant_on_angle(guess, miss, 1e-11)
}

/// Unit-speed polar chart state at (s, phi) with frame direction omega.
pub(crate) fn polar_state(model: &ManifoldModel, s: f64, phi: f64, omega: f64) -> ChartState {
    let rho = ManifoldModel::rho_signed_polar(s, phi);
    let scale = (-model.psi_of_rho(rho)).exp();
    ChartState::Polar([s, phi, scale * omega.cos(), scale * omega.sin() / s.sinh()])
}

fn secant_on_angle<F: Fn(f64) -> f64>(guess: f64, miss: F, tol: f64) -> Result<f64> {
    let mut x0 = guess;
    let mut f0 = miss(x0);
    if f0.abs() < tol {
        return Ok(x0);
    }
    let mut x1 = guess + 1e-3;
    let mut best = f0.abs();
    for _ in 0..40 {
        let f1 = miss(x1);
        best = best.min(f1.abs());
        if f1.abs() < tol {
            return Ok(x1);
        }
        let denom = f1 - f0;
        if denom.abs() < 1e-300 {
            break;
        }
        let step = (-f1 * (x1 - x0) / denom).clamp(-0.5, 0.5);
        x0 = x1;
        f0 = f1;
        x1 += step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    if best < 1e-7 {
        // good enough for downstream product tolerances
        return Ok(x1);
    }
    Err(Error::SolverFailure {
        what: "direction shooting",
        residual: best,
    })
}
