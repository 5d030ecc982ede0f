//! Quasimetric ball masses and Ahlfors-regularity fitting.

use rand::Rng;

use crate::boundary::{BoundaryPoint, QuasiMetric};
use crate::error::{Error, Result};
use crate::measure::lambda_density;
use crate::num::stats::{indexed_rng, linear_fit, Fit};

/// lambda_x-mass of the delta-ball { eta : delta(xi, eta) < r }.
///
/// The sublevel set is located by a scan of the angle chart followed by
/// bisection refinement of each boundary crossing, then the density is
/// integrated over the resulting angular intervals.
pub fn ball_mass(q: &QuasiMetric, xi: BoundaryPoint, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain("ball radius must be positive".into()));
    }
    let n_scan = 4096;
    let tau = std::f64::consts::TAU;
    let g = |theta: f64| -> f64 {
        let eta = BoundaryPoint::new(theta);
        if eta == xi {
            -r
        } else {
            q.delta(xi, eta) - r
        }
    };
    // scan relative to xi so the ball (a neighborhood of xi) is interior
    let vals: Vec<f64> = (0..n_scan)
        .map(|i| g(xi.angle() + tau * i as f64 / n_scan as f64))
        .collect();
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut crossings: Vec<f64> = Vec::new();
    for i in 0..n_scan {
        let a = vals[i];
        let b = vals[(i + 1) % n_scan];
        if (a < 0.0) != (b < 0.0) {
            // bisection refine in the offset coordinate
            let mut lo = tau * i as f64 / n_scan as f64;
            let mut hi = tau * (i + 1) as f64 / n_scan as f64;
            let mut flo = a;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = g(xi.angle() + mid);
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
    }
    if crossings.is_empty() {
        if vals[0] < 0.0 {
            // the whole circle is inside
            intervals.push((0.0, tau));
        }
    } else {
        crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // walk the crossings pairing inside stretches
        let k = crossings.len();
        for w in 0..k {
            let a = crossings[w];
            let b = if w + 1 < k { crossings[w + 1] } else { crossings[0] + tau };
            let mid = 0.5 * (a + b);
            if g(xi.angle() + mid) < 0.0 {
                intervals.push((a, b));
            }
        }
    }
    let mut mass = 0.0;
    for (a, b) in intervals {
        // integrate the density over the interval (uniform for origin base)
        if q.base == crate::models::Point::ORIGIN {
            mass += (b - a) / tau;
        } else {
            let n = 64;
            let mut acc = 0.0;
            for i in 0..=n {
                let th = xi.angle() + a + (b - a) * i as f64 / n as f64;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += w * lambda_density(&q.model, q.base, th)?;
            }
            mass += acc * (b - a) / n as f64;
        }
    }
    Ok(mass.min(1.0))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AhlforsFit {
    pub dimension_estimate: f64,
    /// Two-sided regularity constant max(mass / r^{1/eps}, r^{1/eps} / mass).
    pub c_estimate: f64,
    pub fit: Fit,
    pub n_balls: usize,
}

/// Log-log regression of ball mass against radius over random centers.
pub fn ahlfors_fit(
    q: &QuasiMetric,
    r_grid: &[f64],
    n_centers: usize,
    seed: u64,
) -> Result<AhlforsFit> {
    if r_grid.len() < 4 {
        return Err(Error::Degenerate("radius grid too small".into()));
    }
    let span = r_grid.iter().cloned().fold(f64::MIN, f64::max)
        / r_grid.iter().cloned().fold(f64::MAX, f64::min);
    if span < 31.0 {
        return Err(Error::Degenerate(format!(
            "radius grid must span at least 1.5 decades, got ratio {span:.2}"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut c_est: f64 = 1.0;
    let dim = 1.0 / q.epsilon;
    for c in 0..n_centers {
        let mut rng = indexed_rng(seed, c as u64);
        let xi = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
        for &r in r_grid {
            let mass = ball_mass(q, xi, r)?;
            if mass > 0.0 && mass < 1.0 {
                xs.push(r.ln());
                ys.push(mass.ln());
                let ratio = mass / r.powf(dim);
                c_est = c_est.max(ratio).max(1.0 / ratio);
            }
        }
    }
    if xs.len() < 8 {
        return Err(Error::Degenerate(
            "too few usable (center, radius) pairs".into(),
        ));
    }
    let fit = linear_fit(&xs, &ys);
    Ok(AhlforsFit {
        dimension_estimate: fit.slope,
        c_estimate: c_est,
        fit,
        n_balls: xs.len(),
    })
}
