//! Horosphere curvature profiles along a stored geodesic.
//!
//! One geodesic trace plus two sweeps of the scalar Riccati equation
//! u' = -u^2 - K(gamma(t)) give the mean curvature of both horocycle
//! families at every sample point: the forward sweep seeded far in the
//! past yields m(gamma'(t)), the reverse sweep seeded far in the future
//! yields m(-gamma'(t)). Seed values are forgotten at rate exp(-2 a t).

use crate::models::{GeodesicPath, ManifoldModel};
use crate::num::interp::HermiteSeries;
use crate::num::quad::cumulative_simpson;

pub(crate) struct RayProfile {
    pub t_lo: f64,
    pub h: f64,
    /// m(gamma'(t)) on the uniform grid (valid from t_lo + seed margin).
    pub m_fwd: Vec<f64>,
    /// m(-gamma'(t)) on the same grid (valid up to t_hi - seed margin).
    pub m_bwd: Vec<f64>,
    /// cumulative integral of (f - 1) from the grid start.
    pub cum_f: Vec<f64>,
}

/// Curvature along the path as a function of arclength.
pub(crate) fn curvature_series(model: &ManifoldModel, path: &GeodesicPath) -> impl Fn(f64) -> f64 {
    let rho = path.rho_interpolant();
    let model = model.clone();
    move |t: f64| model.curvature_of_rho(rho.eval(t))
}

/// Fixed-step RK4 sweep of u' = -u^2 - K(t) over the grid, forward.
fn riccati_sweep_fwd<K: Fn(f64) -> f64>(k: &K, t0: f64, h: f64, n: usize, u0: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut u = u0;
    out.push(u);
    let f = |t: f64, u: f64| -u * u - k(t);
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let k1 = f(t, u);
        let k2 = f(t + 0.5 * h, u + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, u + 0.5 * h * k2);
        let k4 = f(t + h, u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(u);
    }
    out
}

impl RayProfile {
    /// Build from a path covering [t_lo, t_hi]; both Riccati sweeps are
    /// seeded with u = 0 at their respective ends (the truncated shape
    /// operator), so m values carry a one-sided exp(-2a (t - t_lo)) or
    /// exp(-2a (t_hi - t)) seeding error.
    pub(crate) fn build(model: &ManifoldModel, path: &GeodesicPath, h: f64) -> RayProfile {
        let t_lo = path.samples.first().map(|s| s.t).unwrap_or(0.0);
        let t_hi = path.samples.last().map(|s| s.t).unwrap_or(0.0);
        let n = ((t_hi - t_lo) / h).round() as usize;
        let k = curvature_series(model, path);
        let m_fwd = riccati_sweep_fwd(&k, t_lo, h, n, 0.0);
        // reverse sweep: integrate v' = -v^2 - K in reversed time
        let krev = |tau: f64| k(t_hi - tau);
        let mut m_bwd = riccati_sweep_fwd(&krev, 0.0, h, n, 0.0);
        m_bwd.reverse();
        let f_minus_1: Vec<f64> = m_fwd
            .iter()
            .zip(&m_bwd)
            .map(|(a, b)| 0.5 * (a + b) - 1.0)
            .collect();
        let cum_f = cumulative_simpson(&f_minus_1, h);
        RayProfile {
            t_lo,
            h,
            m_fwd,
            m_bwd,
            cum_f,
        }
    }

    fn grid_interp(&self, values: &[f64], t: f64) -> f64 {
        let x = (t - self.t_lo) / self.h;
        let n = values.len();
        if x <= 0.0 {
            return values[0];
        }
        if x >= (n - 1) as f64 {
            return values[n - 1];
        }
        let i = x.floor() as usize;
        let u = x - i as f64;
        // 4-point cubic (Catmull-Rom) where possible
        if i >= 1 && i + 2 < n {
            let w = |u: f64| {
                [
                    -0.5 * u * u * u + u * u - 0.5 * u,
                    1.5 * u * u * u - 2.5 * u * u + 1.0,
                    -1.5 * u * u * u + 2.0 * u * u + 0.5 * u,
                    0.5 * u * u * u - 0.5 * u * u,
                ]
            };
            let w = w(u);
            w[0] * values[i - 1] + w[1] * values[i] + w[2] * values[i + 1] + w[3] * values[i + 2]
        } else {
            (1.0 - u) * values[i] + u * values[i + 1]
        }
    }

    pub(crate) fn m_forward(&self, t: f64) -> f64 {
        self.grid_interp(&self.m_fwd, t)
    }

    pub(crate) fn m_backward(&self, t: f64) -> f64 {
        self.grid_interp(&self.m_bwd, t)
    }

    pub(crate) fn f_value(&self, t: f64) -> f64 {
        0.5 * (self.m_forward(t) + self.m_backward(t))
    }

    /// Integral of (f - 1) over [t1, t2].
    pub(crate) fn int_f_minus_1(&self, t1: f64, t2: f64) -> f64 {
        self.cum_at(t2) - self.cum_at(t1)
    }

    fn cum_at(&self, t: f64) -> f64 {
        // Hermite on the cumulative with slope f-1 for sub-grid accuracy.
        let x = (t - self.t_lo) / self.h;
        let n = self.cum_f.len();
        if x <= 0.0 {
            return self.cum_f[0];
        }
        if x >= (n - 1) as f64 {
            return self.cum_f[n - 1];
        }
        let i = x.floor() as usize;
        let u = x - i as f64;
        let (y0, y1) = (self.cum_f[i], self.cum_f[i + 1]);
        let slope = |j: usize| 0.5 * (self.m_fwd[j] + self.m_bwd[j]) - 1.0;
        let (d0, d1) = (slope(i) * self.h, slope(i + 1) * self.h);
        let u2 = u * u;
        let u3 = u2 * u;
        y0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + d0 * (u3 - 2.0 * u2 + u)
            + y1 * (-2.0 * u3 + 3.0 * u2)
            + d1 * (u3 - u2)
    }
}

/// Adaptive solve of u' = -u^2 - K(t) with u(t0) = u0, via the shared
/// RK4 step-doubling driver.
pub(crate) fn riccati_adaptive<K: Fn(f64) -> f64>(
    k: &K,
    t0: f64,
    t1: f64,
    u0: f64,
    tol: f64,
) -> f64 {
    let ctrl = crate::num::ode::StepControl {
        tol,
        h_init: 1e-3,
        h_min: 1e-10,
        h_max: 0.05,
        max_steps: 10_000_000,
    };
    let f = |t: f64, y: &[f64; 1]| [-y[0] * y[0] - k(t)];
    let (y, _) = crate::num::ode::integrate_adaptive(&f, t0, t1, [u0], &ctrl, |_, _| {});
    y[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_curvature_sweep_is_tanh() {
        let k = |_t: f64| -1.0f64;
        let u = riccati_sweep_fwd(&k, 0.0, 0.01, 1000, 0.0);
        for (i, v) in u.iter().enumerate().step_by(100) {
            let t = i as f64 * 0.01;
            assert!((v - t.tanh()).abs() < 1e-9, "u({t}) = {v}");
        }
    }

    #[test]
    fn adaptive_matches_closed_form() {
        let k = |_t: f64| -1.0f64;
        let u = riccati_adaptive(&k, 0.0, 10.0, 0.0, 1e-12);
        assert!((u - 10.0f64.tanh()).abs() < 1e-10);
    }

    #[test]
    fn hermite_cumulative_integral() {
        // profile on the constant model: f == tanh-like, int(f-1) small
        let model = ManifoldModel::constant();
        let v = crate::models::UnitTangent::from_angle(&model, crate::models::Point::ORIGIN, 0.3)
            .unwrap();
        let path = crate::flow::ray_path(&model, &v, 12.0, 12.0, 1e-10);
        let prof = RayProfile::build(&model, &path, 0.01);
        // in the valid window f is 1 within the seeding error
        let f_mid = prof.f_value(5.0);
        assert!((f_mid - 1.0).abs() < 1e-6, "f = {f_mid}");
        let int = prof.int_f_minus_1(0.0, 5.0);
        assert!(int.abs() < 1e-5, "int = {int}");
    }
}
