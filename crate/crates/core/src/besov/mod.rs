//! Besov seminorms over nu, the boundary log-derivative cocycle, its
//! Lp norms and the power-growth experiment that witnesses unbounded
//! cocycles.

use rand::Rng;

use crate::boundary::{boundary_action, boundary_derivative, BoundaryPoint, QuasiMetric};
use crate::error::{Error, Result};
use crate::measure::{lambda_density, rn_nu, NuMeasure};
use crate::models::{isometry_classify, IsometryClass, IsometryElement};
use crate::num::stats::{
    aitken_extrapolate, bootstrap_ci, indexed_rng, linear_fit, Fit, Interval,
};

/// One importance-weighted boundary pair.
struct PairSample {
    xi: BoundaryPoint,
    eta: BoundaryPoint,
    /// nu-weight (already divided by the sample count).
    weight: f64,
    delta: f64,
}

/// Draw n pairs with theta1 uniform and the separation log-uniform,
/// weighted against nu = delta^{-2Q} lambda lambda. The log-uniform
/// separation spreads samples evenly across the scales that drive the
/// near-diagonal mass of the cocycle integrals.
fn draw_pairs(q: &QuasiMetric, q_exp: f64, n: usize, seed: u64, s_min: f64) -> Vec<PairSample> {
    let tau = std::f64::consts::TAU;
    let l = (std::f64::consts::PI / s_min).ln();
    crate::num::par_map(n, |i| {
        let mut rng = indexed_rng(seed, i as u64);
        let t1 = rng.random_range(0.0..tau);
        let u: f64 = rng.random_range(0.0..1.0);
        let mag = s_min * (std::f64::consts::PI / s_min).powf(u);
        let sign = if rng.random_range(0.0..1.0f64) < 0.5 {
            -1.0
        } else {
            1.0
        };
        let t2 = t1 + sign * mag;
        let xi = BoundaryPoint::new(t1);
        let eta = BoundaryPoint::new(t2);
        let delta = q.delta(xi, eta);
        let l1 = lambda_density(&q.model, q.base, t1).unwrap();
        let l2 = lambda_density(&q.model, q.base, t2).unwrap();
        let dens = delta.powf(-2.0 * q_exp) * l1 * l2;
        let proposal = (1.0 / tau) * (1.0 / (2.0 * l * mag));
        PairSample {
            xi,
            eta,
            weight: dens / proposal / n as f64,
            delta,
        }
    })
}

/// Cutoff-laddered Monte Carlo estimate of a pair integral against nu.
struct LadderEstimate {
    estimates: Vec<f64>,
    extrapolated: f64,
    ci: Interval,
    converged: bool,
    n_effective: f64,
}

fn ladder_estimate<F>(
    q: &QuasiMetric,
    q_exp: f64,
    integrand: F,
    n: usize,
    seed: u64,
    cutoffs: &[f64],
) -> LadderEstimate
where
    F: Fn(BoundaryPoint, BoundaryPoint) -> f64 + Sync,
{
    let min_cut = cutoffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let s_min = (0.25 * min_cut.powf(1.0 / q.epsilon)).clamp(1e-12, 1e-4);
    let pairs = draw_pairs(q, q_exp, n, seed, s_min);
    let values: Vec<(f64, f64)> = crate::num::par_map(pairs.len(), |i| {
        let p = &pairs[i];
        (p.delta, p.weight * integrand(p.xi, p.eta))
    });
    let mut estimates = Vec::with_capacity(cutoffs.len());
    for &c in cutoffs {
        let sum: f64 = values
            .iter()
            .filter(|(d, _)| *d >= c)
            .map(|(_, v)| v)
            .sum();
        estimates.push(sum);
    }
    let (extrapolated, contractive) = aitken_extrapolate(&estimates);
    let last = *estimates.last().unwrap();
    // batch means at the finest cutoff for the confidence interval
    let n_batches = crate::defaults::BOOTSTRAP_RESAMPLES;
    let mut batch_sums = vec![0.0f64; n_batches];
    for (i, (d, v)) in values.iter().enumerate() {
        if *d >= min_cut {
            batch_sums[i % n_batches] += v;
        }
    }
    let batch_means: Vec<f64> = batch_sums
        .iter()
        .map(|s| s * n_batches as f64)
        .collect();
    let ci0 = bootstrap_ci(&batch_means, crate::defaults::BOOTSTRAP_RESAMPLES, seed ^ 0x5eed);
    let shift = extrapolated - last;
    let ci = Interval {
        lo: ci0.lo + shift,
        hi: ci0.hi + shift,
    };
    let increment = (last - estimates[estimates.len() - 2]).abs();
    let converged = contractive && increment <= 0.05 * last.abs().max(1e-12);
    let w: Vec<f64> = values.iter().map(|(_, v)| v.abs()).collect();
    let sw: f64 = w.iter().sum();
    let sw2: f64 = w.iter().map(|x| x * x).sum();
    LadderEstimate {
        estimates,
        extrapolated,
        ci,
        converged,
        n_effective: if sw2 > 0.0 { sw * sw / sw2 } else { 0.0 },
    }
}

/// Besov estimate of the defining integral of ||f||_{B_p}^p over the
/// cutoff ladder.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BesovEstimate {
    pub p: f64,
    pub q_exponent: f64,
    pub cutoffs: Vec<f64>,
    /// Integral estimates per cutoff (nondecreasing as the cutoff
    /// shrinks: same sample pool, growing domain).
    pub estimates: Vec<f64>,
    pub extrapolated: f64,
    pub ci: Interval,
    pub converged: bool,
}

impl BesovEstimate {
    /// The seminorm itself (p-th root of the extrapolated integral).
    pub fn seminorm(&self) -> f64 {
        self.extrapolated.max(0.0).powf(1.0 / self.p)
    }
}

/// Monte Carlo Besov seminorm of a boundary function; requires the
/// embedding regime p >= 2Q.
pub fn besov_seminorm<F>(
    f: F,
    p: f64,
    nu: &NuMeasure,
    n: usize,
    seed: u64,
) -> Result<BesovEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    if p < 2.0 * nu.q_exponent {
        return Err(Error::Precondition(format!(
            "Besov seminorm needs p >= 2Q (p = {p}, 2Q = {})",
            2.0 * nu.q_exponent
        )));
    }
    Ok(besov_seminorm_unchecked(f, p, nu, n, seed))
}

/// Exploratory variant without the p >= 2Q precondition, used by the
/// divergence diagnostic near the embedding threshold. No finiteness
/// claim is attached to its output.
pub fn besov_seminorm_unchecked<F>(
    f: F,
    p: f64,
    nu: &NuMeasure,
    n: usize,
    seed: u64,
) -> BesovEstimate
where
    F: Fn(f64) -> f64 + Sync,
{
    let cutoffs = vec![10.0 * nu.cutoff, 3.0 * nu.cutoff, nu.cutoff];
    let est = ladder_estimate(
        nu.q,
        nu.q_exponent,
        |xi, eta| (f(xi.angle()) - f(eta.angle())).abs().powf(p),
        n,
        seed,
        &cutoffs,
    );
    BesovEstimate {
        p,
        q_exponent: nu.q_exponent,
        cutoffs,
        estimates: est.estimates,
        extrapolated: est.extrapolated,
        ci: est.ci,
        converged: est.converged,
    }
}

/// c_g(xi, eta) = log |g'|(xi) - log |g'|(eta); antisymmetric by
/// construction.
pub fn cocycle_value(
    q: &QuasiMetric,
    g: &IsometryElement,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
) -> Result<f64> {
    let a = boundary_derivative(q, g, xi, None)?.value.ln();
    let b = boundary_derivative(q, g, eta, None)?.value.ln();
    Ok(a - b)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CocycleNorm {
    /// Estimate of the integral ||c_g||_{Lp(nu)}^p.
    pub estimate: f64,
    pub ci: Interval,
    pub per_cutoff: Vec<(f64, f64)>,
    pub converged: bool,
    pub n_effective: f64,
}

/// int |c_g|^p d nu with the diagonal cutoff ladder and Richardson
/// extrapolation; precondition p >= 2Q = 2/eps.
pub fn cocycle_lp_norm(
    q: &QuasiMetric,
    g: &IsometryElement,
    p: f64,
    n: usize,
    seed: u64,
    cutoff: f64,
) -> Result<CocycleNorm> {
    let q_exp = 1.0 / q.epsilon;
    if p < 2.0 * q_exp {
        return Err(Error::Precondition(format!(
            "cocycle Lp norm needs p >= 2/eps (p = {p}, 2/eps = {})",
            2.0 * q_exp
        )));
    }
    if n < 1000 {
        return Err(Error::Precondition("need at least 1000 samples".into()));
    }
    let cutoffs = vec![10.0 * cutoff, 3.0 * cutoff, cutoff];
    let est = ladder_estimate(
        q,
        q_exp,
        |xi, eta| {
            cocycle_value(q, g, xi, eta)
                .map(|c| c.abs().powf(p))
                .unwrap_or(0.0)
        },
        n,
        seed,
        &cutoffs,
    );
    Ok(CocycleNorm {
        estimate: est.extrapolated,
        ci: est.ci,
        per_cutoff: cutoffs.into_iter().zip(est.estimates).collect(),
        converged: est.converged,
        n_effective: est.n_effective,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SeriesEntry {
    pub k: i32,
    pub norm_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_effective: f64,
}

/// The power-growth experiment: ||c_{g^k}||_p^p for k = 1..k_max.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CocycleSeries {
    pub p: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub entries: Vec<SeriesEntry>,
    pub fit: Fit,
    /// Strictly increasing from k = 2 on.
    pub increasing: bool,
    pub verdict: String,
    /// min / max of sampled RN_nu(g^l) over l in [-6, 6], the power
    /// bound hypothesis diagnostic.
    pub rn_range: (f64, f64),
    /// per-l log-range of RN_nu(g^l) for the no-trend check.
    pub rn_log_range: Vec<(i32, f64)>,
}

pub fn growth_experiment(
    q: &QuasiMetric,
    g: &IsometryElement,
    p: f64,
    k_max: i32,
    n: usize,
    seed: u64,
) -> Result<CocycleSeries> {
    let class = isometry_classify(g);
    if class.class != IsometryClass::Loxodromic {
        return Err(Error::Precondition(format!(
            "growth experiment needs a loxodromic element, got {:?}",
            class.class
        )));
    }
    let inv_class = isometry_classify(&g.inverse());
    if inv_class.attracting_fixed_point.is_none() {
        return Err(Error::Precondition(
            "inverse element lacks an attracting fixed point".into(),
        ));
    }
    let q_exp = 1.0 / q.epsilon;
    if p < 2.0 * q_exp {
        return Err(Error::Precondition(format!(
            "growth experiment needs p >= 2/eps (p = {p}, 2/eps = {})",
            2.0 * q_exp
        )));
    }
    // RN_nu power-bound diagnostic over a small pair sample
    let mut rn_min = f64::INFINITY;
    let mut rn_max = 0.0f64;
    let mut rn_log_range = Vec::new();
    for l in -6..=6 {
        if l == 0 {
            continue;
        }
        let gl = g.pow(l);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..200u64 {
            let mut rng = indexed_rng(seed ^ 0x51, i);
            let xi = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
            let eta = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
            if xi == eta {
                continue;
            }
            if let Ok(v) = rn_nu(q, &gl, xi, eta) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        rn_min = rn_min.min(lo);
        rn_max = rn_max.max(hi);
        rn_log_range.push((l, (hi / lo).ln()));
    }
    // shared sample pool across k for a smooth series
    let cutoff = crate::defaults::NU_CUTOFF;
    let mut entries = Vec::new();
    for k in 1..=k_max {
        let gk = g.pow(k);
        let norm = cocycle_lp_norm(q, &gk, p, n, seed, cutoff)?;
        entries.push(SeriesEntry {
            k,
            norm_estimate: norm.estimate,
            ci_low: norm.ci.lo,
            ci_high: norm.ci.hi,
            n_effective: norm.n_effective,
        });
    }
    let xs: Vec<f64> = entries.iter().map(|e| e.k as f64).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.norm_estimate).collect();
    let fit = linear_fit(&xs, &ys);
    let increasing = entries
        .windows(2)
        .skip(1)
        .all(|w| w[1].norm_estimate > w[0].norm_estimate);
    let verdict = if increasing && fit.slope > 0.0 {
        "unbounded-growth evidence: yes".to_string()
    } else {
        "unbounded-growth evidence: no".to_string()
    };
    Ok(CocycleSeries {
        p,
        epsilon: q.epsilon,
        seed,
        entries,
        fit,
        increasing,
        verdict,
        rn_range: (rn_min, rn_max),
        rn_log_range,
    })
}

/// Series CSV with the fixed external header.
pub fn series_csv(series: &CocycleSeries) -> String {
    let mut out = String::from("k,norm_estimate,ci_low,ci_high,n_effective\n");
    for e in &series.entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.k, e.norm_estimate, e.ci_low, e.ci_high, e.n_effective
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ManifoldModel, Point};

    fn quasi() -> QuasiMetric {
        QuasiMetric::new(&ManifoldModel::constant(), Point::ORIGIN, 1.0).unwrap()
    }

    #[test]
    fn constant_function_has_zero_seminorm() {
        let q = quasi();
        let nu = NuMeasure::standard(&q, 1e-3).unwrap();
        let est = besov_seminorm(|_| 2.5, 2.0, &nu, 4000, 1).unwrap();
        assert_eq!(est.extrapolated, 0.0);
        assert!(est.seminorm() == 0.0);
    }

    #[test]
    fn precondition_rejects_small_p() {
        let q = quasi();
        let nu = NuMeasure::standard(&q, 1e-3).unwrap();
        assert!(besov_seminorm(|t| t.cos(), 1.5, &nu, 1000, 1).is_err());
    }

    #[test]
    fn estimates_monotone_in_cutoff() {
        let q = quasi();
        let nu = NuMeasure::standard(&q, 1e-3).unwrap();
        let est = besov_seminorm(|t| t.cos(), 2.0, &nu, 20_000, 5).unwrap();
        assert!(est.estimates.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn rotation_cocycle_vanishes() {
        let q = quasi();
        let g = IsometryElement::rotation(1.0);
        let c = cocycle_value(&q, &g, BoundaryPoint::new(0.3), BoundaryPoint::new(2.0)).unwrap();
        assert!(c.abs() < 1e-10, "c = {c}");
        let norm = cocycle_lp_norm(&q, &g, 2.0, 2000, 3, 1e-3).unwrap();
        assert!(norm.estimate.abs() < 1e-12, "norm = {}", norm.estimate);
    }

    #[test]
    fn loxodromic_cocycle_between_fixed_points() {
        let q = quasi();
        let g = IsometryElement::loxodromic_axis(1.0);
        let c = cocycle_value(
            &q,
            &g,
            BoundaryPoint::new(0.0),
            BoundaryPoint::new(std::f64::consts::PI),
        )
        .unwrap();
        assert!((c + 2.0).abs() < 1e-7, "c = {c}");
    }

    #[test]
    fn cocycle_antisymmetry_exact() {
        let q = quasi();
        let g = IsometryElement::loxodromic_axis(0.7);
        let xi = BoundaryPoint::new(0.4);
        let eta = BoundaryPoint::new(2.6);
        let a = cocycle_value(&q, &g, xi, eta).unwrap();
        let b = cocycle_value(&q, &g, eta, xi).unwrap();
        assert_eq!(a + b, 0.0);
    }

    #[test]
    fn growth_rejects_elliptic() {
        let q = quasi();
        let rot = IsometryElement::rotation(0.5);
        assert!(growth_experiment(&q, &rot, 2.0, 4, 2000, 1).is_err());
    }
}
