//! Small statistics toolbox: moments, bootstrap intervals, least squares.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Standard error of the mean.
pub fn std_err(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    std_dev(xs) / (xs.len() as f64).sqrt()
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Percentile bootstrap interval (2.5%..97.5%) for the mean of `xs`,
/// deterministic in the seed.
pub fn bootstrap_ci(xs: &[f64], resamples: usize, seed: u64) -> Interval {
    if xs.len() < 2 {
        let m = mean(xs);
        return Interval { lo: m, hi: m };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples.max(4))
        .map(|_| {
            let mut acc = 0.0;
            for _ in 0..xs.len() {
                acc += xs[rng.random_range(0..xs.len())];
            }
            acc / xs.len() as f64
        })
        .collect();
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo_idx = ((means.len() as f64) * 0.025).floor() as usize;
    let hi_idx = (((means.len() as f64) * 0.975).ceil() as usize).min(means.len() - 1);
    Interval {
        lo: means[lo_idx],
        hi: means[hi_idx],
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Standard error of the slope estimate.
    pub slope_se: f64,
}

/// Ordinary least squares y = a + b x.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Fit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = syy - slope * sxy;
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let dof = (n - 2.0).max(1.0);
    let slope_se = (ss_res.max(0.0) / dof / sxx).sqrt();
    Fit {
        slope,
        intercept,
        r2,
        slope_se,
    }
}

/// Aitken / geometric-sequence extrapolation of a convergent ladder.
/// Returns the extrapolated limit and whether the step ratios looked
/// contractive (|q| < 1).
pub fn aitken_extrapolate(seq: &[f64]) -> (f64, bool) {
    let n = seq.len();
    if n < 3 {
        return (*seq.last().unwrap_or(&f64::NAN), false);
    }
    let (a, b, c) = (seq[n - 3], seq[n - 2], seq[n - 1]);
    let d1 = b - a;
    let d2 = c - b;
    let denom = d2 - d1;
    if denom.abs() < 1e-300 || d1 == 0.0 {
        return (c, true);
    }
    let q = d2 / d1;
    if q.abs() < 1.0 && q.is_finite() {
        (c + d2 * q / (1.0 - q), true)
    } else {
        (c, false)
    }
}

/// Deterministic per-index RNG stream: every sample index gets its own
/// ChaCha stream, so results do not depend on how work is partitioned
/// across workers.
pub fn indexed_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_line() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let f = linear_fit(&xs, &ys);
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 3.0).abs() < 1e-12);
        assert!(f.r2 > 0.999999);
    }

    #[test]
    fn aitken_geometric() {
        // s_k = 1 - 0.5^k converges to 1.
        let seq: Vec<f64> = (1..6).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        let (lim, ok) = aitken_extrapolate(&seq);
        assert!(ok);
        assert!((lim - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indexed_rng_is_partition_independent() {
        use rand::Rng;
        let a: Vec<u64> = (0..8).map(|i| indexed_rng(7, i).random()).collect();
        let b: Vec<u64> = (0..8)
            .rev()
            .map(|i| indexed_rng(7, i).random())
            .rev()
            .collect();
        // reversed iteration order, same per-index values
        let b: Vec<u64> = b.into_iter().collect();
        assert_eq!(a, b);
    }
}
