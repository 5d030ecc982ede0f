//! Horosphere shape data via the Riccati equation: mean curvature with
//! an exponential truncation guarantee, the flip-symmetrized weight f,
//! Jacobi field solves, the symmetry defect of the curvature integral,
//! and Hoelder-exponent estimation.

pub(crate) mod profile;

use rand::Rng;

use crate::error::{Error, Result};
use crate::models::{trace, ChartState, GeodesicPath, ManifoldModel, Point, UnitTangent};
use crate::num::ode::StepControl;
use crate::num::quad::simpson;
use crate::num::stats::{indexed_rng, linear_fit, Fit};
pub(crate) use profile::{riccati_adaptive, RayProfile};

/// Result of a truncated Riccati solve for the horosphere mean curvature.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct RiccatiResult {
    /// u(R), the truncated mean curvature m_R(v).
    pub value: f64,
    pub horizon: f64,
    /// Rigorous truncation bound b exp(-2a R): the seed error at -R is at
    /// most b and the Riccati flow contracts at rate at least 2a.
    pub est_truncation_error: f64,
    pub solver_tolerance: f64,
}

fn geodesic_ctrl(model: &ManifoldModel, tol: f64) -> StepControl {
    StepControl {
        tol: tol.min(1e-9),
        // keep dense samples tight enough for curvature interpolation
        h_max: if model.is_perturbed() { 0.05 } else { 0.25 },
        ..Default::default()
    }
}

/// Trace the geodesic through v over [-back, fwd] (arclength), returning
/// a single dense path with t = 0 at the base point.
pub(crate) fn ray_path(
    model: &ManifoldModel,
    v: &UnitTangent,
    back: f64,
    fwd: f64,
    tol: f64,
) -> GeodesicPath {
    ray_path_state(model, ChartState::from_unit_tangent(v), back, fwd, tol)
}

/// As `ray_path`, starting from an arbitrary chart state.
pub(crate) fn ray_path_state(
    model: &ManifoldModel,
    start: ChartState,
    back: f64,
    fwd: f64,
    tol: f64,
) -> GeodesicPath {
    let ctrl = geodesic_ctrl(model, tol);
    let mut samples = Vec::new();
    let mut truncated = None;
    if back > 0.0 {
        let bwd = trace(model, start.flip(), back, &ctrl, true);
        truncated = truncated.or(bwd.truncated.map(|t| -t));
        for s in bwd.samples.iter().skip(1).rev() {
            samples.push(crate::models::PathSample {
                t: -s.t,
                s: s.s,
                phi: s.phi,
                ds: -s.ds,
                dphi: -s.dphi,
                rho: s.rho,
                drho: -s.drho,
            });
        }
    }
    let fwd_path = trace(model, start, fwd.max(0.0), &ctrl, true);
    truncated = truncated.or(fwd_path.truncated);
    samples.extend(fwd_path.samples.iter().copied());
    GeodesicPath {
        samples,
        end: fwd_path.end,
        truncated,
    }
}

/// Integrate u' = -u^2 - K(gamma_v(t - R)) for t in [0, R] with u(0) = 0
/// and return u(R), an approximation of the horosphere mean curvature
/// m(v) with error bounded by est_truncation_error plus solver error.
pub fn riccati_mean_curvature(
    model: &ManifoldModel,
    v: &UnitTangent,
    horizon: f64,
    tol: f64,
) -> Result<RiccatiResult> {
    if !(horizon > 0.0) {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let path = ray_path(model, v, horizon, 0.0, tol);
    if let Some(at) = path.truncated {
        return Err(Error::Truncated {
            achieved: at,
            requested: -horizon,
        });
    }
    let k = profile::curvature_series(model, &path);
    // K(gamma(t - R)) for t in [0, R] is the stored curvature at t - R.
    let value = riccati_adaptive(&|t| k(t - horizon), 0.0, horizon, 0.0, tol);
    let (a, b) = model.curvature_bounds;
    Ok(RiccatiResult {
        value,
        horizon,
        est_truncation_error: b * (-2.0 * a * horizon).exp(),
        solver_tolerance: tol,
    })
}

/// f(v) = (m(v) + m(-v)) / 2, symmetrized in code so that
/// f(v) == f(-v) exactly.
pub fn f_symmetric(model: &ManifoldModel, v: &UnitTangent, horizon: f64) -> Result<f64> {
    let tol = crate::defaults::ODE_TOL;
    let m_plus = riccati_mean_curvature(model, v, horizon, tol)?.value;
    let m_minus = riccati_mean_curvature(model, &v.flip(), horizon, tol)?.value;
    Ok(0.5 * (m_plus + m_minus))
}

/// Scalar Jacobi field along the geodesic through v:
/// J'' + K(gamma(t)) J = 0 with J(0) = j0, J'(0) = dj0.
#[derive(Debug, Clone)]
pub struct JacobiSolution {
    /// samples (t, J(t), J'(t)) on a uniform grid
    pub samples: Vec<(f64, f64, f64)>,
    pub end_value: f64,
    pub end_derivative: f64,
}

pub fn jacobi_solve(
    model: &ManifoldModel,
    v: &UnitTangent,
    j0: f64,
    dj0: f64,
    t_end: f64,
) -> Result<JacobiSolution> {
    if j0 == 0.0 && dj0 == 0.0 {
        return Err(Error::Degenerate("both Jacobi initial values are zero".into()));
    }
    if !t_end.is_finite() {
        return Err(Error::Domain("non-finite end time".into()));
    }
    let (back, fwd) = if t_end >= 0.0 { (0.0, t_end) } else { (-t_end, 0.0) };
    let path = ray_path(model, v, back + 0.01, fwd + 0.01, crate::defaults::ODE_TOL);
    let k = profile::curvature_series(model, &path);
    let sign = t_end.signum();
    let f = |t: f64, y: &[f64; 2]| {
        let tt = sign * t;
        [sign * y[1], -sign * k(tt) * y[0]]
    };
    let ctrl = StepControl {
        tol: 1e-12,
        h_max: 0.02,
        ..Default::default()
    };
    let mut samples = Vec::new();
    let n_rec = 256usize;
    let rec_h = t_end.abs() / n_rec as f64;
    let mut next_rec = 0.0f64;
    let (end, _) = crate::num::ode::integrate_adaptive(
        &f,
        0.0,
        t_end.abs(),
        [j0, dj0],
        &ctrl,
        |t, y| {
            if t + 1e-12 >= next_rec {
                samples.push((sign * t, y[0], y[1]));
                next_rec += rec_h;
            }
        },
    );
    Ok(JacobiSolution {
        samples,
        end_value: end[0],
        end_derivative: end[1],
    })
}

/// | int_0^t m(gamma'(s)) ds - int_0^t m(-gamma'(s)) ds |.
pub fn symmetry_defect(model: &ManifoldModel, v: &UnitTangent, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain("symmetry defect needs t > 0".into()));
    }
    let seed = crate::defaults::PROFILE_SEED;
    let path = ray_path(model, v, seed, t + seed, crate::defaults::ODE_TOL);
    if let Some(at) = path.truncated {
        return Err(Error::Truncated {
            achieved: at,
            requested: t + seed,
        });
    }
    let prof = RayProfile::build(model, &path, 0.01);
    let diff = simpson(
        |s| prof.m_forward(s) - prof.m_backward(s),
        0.0,
        t,
        (t / 0.02) as usize + 8,
    );
    Ok(diff.abs())
}

/// Hoelder exponent estimate for v -> m(v) over the fiber at x.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HolderEstimate {
    pub exponent: f64,
    pub fit: Fit,
    /// True when the field is constant to solver precision and the
    /// regression is meaningless.
    pub degenerate: bool,
    pub n_used: usize,
}

/// Regress log |m(v) - m(w)| on log angle(v, w) over sampled pairs in
/// the fiber at x; angles are drawn log-uniformly from `angle_range`.
pub fn holder_exponent(
    model: &ManifoldModel,
    x: Point,
    n_pairs: usize,
    angle_range: (f64, f64),
    seed: u64,
) -> Result<HolderEstimate> {
    let (lo, hi) = angle_range;
    if !(lo > 0.0 && hi > lo && hi <= std::f64::consts::FRAC_PI_4) {
        return Err(Error::Precondition(
            "angle_range must satisfy 0 < lo < hi <= pi/4".into(),
        ));
    }
    if n_pairs < 8 {
        return Err(Error::Precondition("need at least 8 pairs".into()));
    }
    let horizon = crate::defaults::RICCATI_HORIZON;
    let tol = 1e-11;
    let rows = crate::num::par_map(n_pairs, |i| {
        let mut rng = indexed_rng(seed, i as u64);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let dtheta = lo * (hi / lo).powf(rng.random_range(0.0..1.0f64));
        let v = UnitTangent::from_angle(model, x, theta).unwrap();
        let w = UnitTangent::from_angle(model, x, theta + dtheta).unwrap();
        let mv = riccati_mean_curvature(model, &v, horizon, tol).unwrap().value;
        let mw = riccati_mean_curvature(model, &w, horizon, tol).unwrap().value;
        (dtheta, (mv - mw).abs())
    });
    let noise_floor = 1e-9;
    let spread = rows
        .iter()
        .map(|r| r.1)
        .fold(0.0f64, f64::max);
    if spread < noise_floor {
        return Ok(HolderEstimate {
            exponent: 0.0,
            fit: Fit {
                slope: 0.0,
                intercept: 0.0,
                r2: 0.0,
                slope_se: 0.0,
            },
            degenerate: true,
            n_used: 0,
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (d, dm) in &rows {
        if *dm > noise_floor {
            xs.push(d.ln());
            ys.push(dm.ln());
        }
    }
    if xs.len() < rows.len() / 2 {
        return Ok(HolderEstimate {
            exponent: 0.0,
            fit: Fit {
                slope: 0.0,
                intercept: 0.0,
                r2: 0.0,
                slope_se: 0.0,
            },
            degenerate: true,
            n_used: xs.len(),
        });
    }
    let fit = linear_fit(&xs, &ys);
    Ok(HolderEstimate {
        exponent: fit.slope,
        fit,
        degenerate: false,
        n_used: xs.len(),
    })
}

/// Handle for repeated mean-curvature evaluation with fixed parameters.
/// Evaluation is pure recomputation (no cache), so identical queries
/// agree bit-exactly and concurrent use is safe.
pub struct MeanCurvatureField<'m> {
    pub model: &'m ManifoldModel,
    pub horizon: f64,
    pub tol: f64,
    /// Empirical truncation constant from a Richardson probe at
    /// horizons (R, 2R); the paper only guarantees existence.
    pub c0_hat: f64,
}

impl<'m> MeanCurvatureField<'m> {
    pub fn new(model: &'m ManifoldModel, horizon: f64, tol: f64) -> Result<Self> {
        // Calibrate the truncation constant once per model on a probe
        // vector crossing the bump region.
        let probe = UnitTangent::from_angle(model, Point::ORIGIN, 0.7)?;
        let r0 = 6.0;
        let m1 = riccati_mean_curvature(model, &probe, r0, tol)?.value;
        let m2 = riccati_mean_curvature(model, &probe, 2.0 * r0, tol)?.value;
        let a = model.curvature_bounds.0;
        let c0_hat = ((m1 - m2).abs() * (2.0 * a * r0).exp()).max(1e-12);
        Ok(MeanCurvatureField {
            model,
            horizon,
            tol,
            c0_hat,
        })
    }

    pub fn m(&self, v: &UnitTangent) -> Result<f64> {
        Ok(riccati_mean_curvature(self.model, v, self.horizon, self.tol)?.value)
    }

    pub fn f(&self, v: &UnitTangent) -> Result<f64> {
        f_symmetric(self.model, v, self.horizon)
    }

    /// Empirical truncation estimate at a given horizon.
    pub fn truncation_estimate(&self, horizon: f64) -> f64 {
        self.c0_hat * (-2.0 * self.model.curvature_bounds.0 * horizon).exp()
    }
}
