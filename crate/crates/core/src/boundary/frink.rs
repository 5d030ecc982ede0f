//! Chain metrization of the quasimetric: the Frink-style infimum of
//! chain sums through a sampled net of boundary points.

use rand::Rng;

use crate::boundary::quasimetric::QuasiMetric;
use crate::boundary::BoundaryPoint;
use crate::num::stats::indexed_rng;

pub struct FrinkMetric<'q> {
    q: &'q QuasiMetric,
    net: Vec<BoundaryPoint>,
    /// min-plus closure over the net, hop count capped by chain_depth.
    closure: Vec<f64>,
    pub chain_depth: usize,
}

/// Build the chain-metric evaluator over `n_net` seeded sample points.
/// Chains pass through net points only and use at most `chain_depth`
/// edges; on the net itself the returned distances satisfy the triangle
/// inequality exactly by construction.
pub fn frink_metrize<'q>(
    q: &'q QuasiMetric,
    n_net: usize,
    chain_depth: usize,
    seed: u64,
) -> FrinkMetric<'q> {
    let mut rng = indexed_rng(seed, 0);
    let net: Vec<BoundaryPoint> = (0..n_net)
        .map(|_| BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let n = net.len();
    let mut direct = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = q.delta(net[i], net[j]);
            direct[i * n + j] = d;
            direct[j * n + i] = d;
        }
    }
    // min-plus powers: closure_k = min over paths with <= k edges
    let mut closure = direct.clone();
    let hops = chain_depth.saturating_sub(2).min(n);
    for _ in 0..hops {
        let mut next = closure.clone();
        for i in 0..n {
            for j in 0..n {
                let mut best = next[i * n + j];
                for k in 0..n {
                    let via = closure[i * n + k] + direct[k * n + j];
                    if via < best {
                        best = via;
                    }
                }
                next[i * n + j] = best;
            }
        }
        if next == closure {
            break;
        }
        closure = next;
    }
    FrinkMetric {
        q,
        net,
        closure,
        chain_depth,
    }
}

impl FrinkMetric<'_> {
    /// Chain distance d(xi, eta) <= delta(xi, eta).
    pub fn eval(&self, xi: BoundaryPoint, eta: BoundaryPoint) -> f64 {
        if xi == eta {
            return 0.0;
        }
        let mut best = self.q.delta(xi, eta);
        if self.chain_depth < 2 {
            return best;
        }
        let n = self.net.len();
        let a: Vec<f64> = self.net.iter().map(|z| self.q.delta(xi, *z)).collect();
        let b: Vec<f64> = self.net.iter().map(|z| self.q.delta(*z, eta)).collect();
        for i in 0..n {
            // two-edge chain through one net point
            best = best.min(a[i] + b[i]);
            if self.chain_depth >= 3 {
                for j in 0..n {
                    let via = a[i] + self.closure[i * n + j] + b[j];
                    if via < best {
                        best = via;
                    }
                }
            }
        }
        best
    }

    /// Lower-bound ratio c with c * delta <= d over sampled pairs.
    pub fn lower_bound_ratio(&self, n_pairs: usize, seed: u64) -> f64 {
        let mut c = f64::INFINITY;
        for i in 0..n_pairs {
            let mut rng = indexed_rng(seed, i as u64 + 1);
            let xi = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
            let eta = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
            if xi == eta {
                continue;
            }
            let delta = self.q.delta(xi, eta);
            if delta > 0.0 {
                c = c.min(self.eval(xi, eta) / delta);
            }
        }
        c
    }

    /// Exact triangle-inequality defect over net triples (should be 0).
    pub fn net_triangle_defect(&self) -> f64 {
        let n = self.net.len();
        let mut worst = 0.0f64;
        for i in 0..n.min(40) {
            for j in 0..n.min(40) {
                for k in 0..n.min(40) {
                    let d = self.closure[i * n + j]
                        - self.closure[i * n + k]
                        - self.closure[k * n + j];
                    worst = worst.max(d);
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ManifoldModel, Point};

    #[test]
    fn chains_do_not_improve_a_true_metric() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 1.0).unwrap();
        let f = frink_metrize(&q, 96, 3, 5);
        for k in 0..30 {
            let a = BoundaryPoint::new(0.21 * k as f64);
            let b = BoundaryPoint::new(1.0 + 0.13 * k as f64);
            let d = f.eval(a, b);
            let delta = q.delta(a, b);
            assert!(d <= delta + 1e-15);
            assert!((d - delta).abs() < 1e-9, "chain undercut a metric: {d} vs {delta}");
        }
        assert_eq!(f.eval(BoundaryPoint::new(1.0), BoundaryPoint::new(1.0)), 0.0);
    }

    #[test]
    fn net_triangle_is_exact() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 0.5).unwrap();
        let f = frink_metrize(&q, 64, 4, 9);
        assert!(f.net_triangle_defect() <= 1e-12);
    }

    #[test]
    fn snowflaked_metric_keeps_frink_ratio() {
        // eps = 0.5 on the constant model: delta = (half chordal)^{1/2},
        // a snowflake with K-hat < 2, so chains lose at most factor 4.
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 0.5).unwrap();
        let f = frink_metrize(&q, 96, 3, 5);
        let c = f.lower_bound_ratio(2000, 17);
        assert!(c >= 0.25, "lower-bound ratio {c}");
    }
}
