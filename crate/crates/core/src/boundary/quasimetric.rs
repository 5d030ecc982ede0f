//! The visual quasimetric delta_{x,eps}(xi, eta) = exp(-eps (xi|eta)_x)
//! and its bulk evaluator.
//!
//! On the constant model the product reduces to the closed form
//! -log sin(dtheta/2) (plus the Busemann change of base), and delta is
//! exactly the snowflaked half-chordal metric. On the perturbed model
//! bulk evaluation interpolates the bounded correction
//! H(t1, t2) = (xi|eta)_0 + log sin(dtheta/2) from a torus grid filled
//! by the ray pipeline; H extends continuously to the diagonal because
//! the mean-curvature integrals along a geodesic and its reverse differ
//! by a bounded amount.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::boundary::products::{gromov_product_with_offset, GromovParams};
use crate::boundary::BoundaryPoint;
use crate::error::{Error, Result};
use crate::hyperbolic::{self, angular_distance};
use crate::models::{ManifoldModel, ModelKind, Point};
use crate::num::interp::TorusTable;
use crate::num::stats::indexed_rng;

/// Interpolated correction table for the origin-based product.
pub(crate) struct ProductTable {
    table: TorusTable,
}

impl ProductTable {
    fn grid_key(model: &ManifoldModel, n: usize) -> (u64, u64, usize) {
        let p = model.profile.expect("tables are for the perturbed model");
        (p.amplitude.to_bits(), p.support_radius.to_bits(), n)
    }

    /// Build (or fetch from the process-wide cache) the n x n table.
    pub(crate) fn shared(model: &ManifoldModel, n: usize) -> Arc<ProductTable> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u64, usize), Arc<ProductTable>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = Self::grid_key(model, n);
        if let Some(t) = cache.lock().unwrap().get(&key) {
            return t.clone();
        }
        let built = Arc::new(ProductTable::build(model, n));
        cache.lock().unwrap().insert(key, built.clone());
        built
    }

    fn build(model: &ManifoldModel, n: usize) -> ProductTable {
        let params = GromovParams::table();
        let tau = std::f64::consts::TAU;
        // one shared set of per-angle ray data
        let rays: Vec<_> = crate::num::par_map(n, |i| {
            crate::boundary::products::ray_data(
                model,
                Point::ORIGIN,
                tau * i as f64 / n as f64,
                &params,
            )
            .expect("origin ray")
        });
        let lm = crate::boundary::landing::landing(model);
        let mut data = vec![0.0f64; n * n];
        // strict upper triangle in the cyclic sense: pair (i, j), i < j
        let entries: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let values = crate::num::par_map(entries.len(), |idx| {
            let (i, j) = entries[idx];
            let th_i = tau * i as f64 / n as f64;
            let th_j = tau * j as f64 / n as f64;
            let (rho, prof) = crate::boundary::products::connect_ideal(
                model,
                &rays[i],
                lm.to_euclid(th_j),
                &params,
            )
            .expect("connector");
            let product = crate::boundary::products::product_from_parts(
                &rays[i], &rays[j], &rho, &prof, &params,
            );
            product + (0.5 * angular_distance(th_i, th_j)).sin().ln()
        });
        for (idx, &(i, j)) in entries.iter().enumerate() {
            data[i * n + j] = values[idx];
            data[j * n + i] = values[idx];
        }
        // diagonal: quadratic extrapolation along the row
        for i in 0..n {
            let a = data[i * n + (i + 1) % n];
            let b = data[i * n + (i + 2) % n];
            let c = data[i * n + (i + 3) % n];
            data[i * n + i] = 3.0 * a - 3.0 * b + c;
        }
        ProductTable {
            table: TorusTable::new(n, data),
        }
    }

    pub(crate) fn correction(&self, th1: f64, th2: f64) -> f64 {
        self.table.eval(th1, th2)
    }
}

enum Evaluator {
    /// Closed form (constant model, any base point).
    Closed,
    /// Table-backed (perturbed model, base at the origin).
    Table(Arc<ProductTable>),
    /// Per-query ray pipeline (perturbed model, arbitrary base).
    Direct(GromovParams),
}

/// Quasimetric evaluator over boundary points for a fixed base and
/// exponent.
pub struct QuasiMetric {
    pub model: ManifoldModel,
    pub base: Point,
    pub epsilon: f64,
    evaluator: Evaluator,
    estimated_constant: OnceLock<f64>,
}

/// How `QuasiMetric::new` chooses its evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductSource {
    /// Closed form on the constant model, table at the origin of the
    /// perturbed model, direct pipeline elsewhere.
    Auto,
    /// Force the interpolation table with the given grid size.
    ForceTable(usize),
    /// Force per-query pipeline evaluation.
    ForceDirect,
}

impl QuasiMetric {
    pub fn new(model: &ManifoldModel, base: Point, epsilon: f64) -> Result<QuasiMetric> {
        QuasiMetric::with_source(model, base, epsilon, ProductSource::Auto)
    }

    pub fn with_source(
        model: &ManifoldModel,
        base: Point,
        epsilon: f64,
        source: ProductSource,
    ) -> Result<QuasiMetric> {
        if !(epsilon > 0.0) {
            return Err(Error::Precondition("epsilon must be positive".into()));
        }
        let evaluator = match source {
            ProductSource::ForceDirect => Evaluator::Direct(GromovParams::default()),
            ProductSource::ForceTable(n) => {
                if base != Point::ORIGIN {
                    return Err(Error::Precondition(
                        "product table is built for the origin base point".into(),
                    ));
                }
                if model.kind == ModelKind::ConstantCurvature {
                    return Err(Error::Precondition(
                        "table evaluation is for the perturbed model".into(),
                    ));
                }
                Evaluator::Table(ProductTable::shared(model, n))
            }
            ProductSource::Auto => match model.kind {
                ModelKind::ConstantCurvature => Evaluator::Closed,
                ModelKind::PerturbedAxial if base == Point::ORIGIN => Evaluator::Table(
                    ProductTable::shared(model, crate::defaults::PRODUCT_TABLE_N),
                ),
                ModelKind::PerturbedAxial => Evaluator::Direct(GromovParams::default()),
            },
        };
        Ok(QuasiMetric {
            model: model.clone(),
            base,
            epsilon,
            evaluator,
            estimated_constant: OnceLock::new(),
        })
    }

    /// The Gromov product (xi | eta)_base backing this quasimetric.
    pub fn product(&self, xi: BoundaryPoint, eta: BoundaryPoint) -> f64 {
        match &self.evaluator {
            Evaluator::Closed => hyperbolic::gromov_product(self.base.z(), xi.angle(), eta.angle()),
            Evaluator::Table(t) => {
                let half = 0.5 * angular_distance(xi.angle(), eta.angle());
                -half.sin().ln() + t.correction(xi.angle(), eta.angle())
            }
            Evaluator::Direct(params) => {
                gromov_product_with_offset(&self.model, self.base, xi, eta, 0.0, params)
                    .expect("product pipeline")
            }
        }
    }

    /// delta_{x,eps}(xi, eta) = exp(-eps (xi|eta)_x); 0 on the diagonal
    /// by the continuity convention.
    pub fn delta(&self, xi: BoundaryPoint, eta: BoundaryPoint) -> f64 {
        if xi == eta {
            return 0.0;
        }
        (-self.epsilon * self.product(xi, eta)).exp()
    }

    /// Largest sampled delta value (diameter proxy on a uniform grid).
    pub fn diameter(&self, n: usize) -> f64 {
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = BoundaryPoint::new(std::f64::consts::TAU * i as f64 / n as f64);
                let b = BoundaryPoint::new(std::f64::consts::TAU * j as f64 / n as f64);
                best = best.max(self.delta(a, b));
            }
        }
        best
    }

    pub fn last_estimated_constant(&self) -> Option<f64> {
        self.estimated_constant.get().copied()
    }
}

/// Estimated quasimetric constant: the maximum over sampled triples of
/// delta(xi, eta) / (delta(xi, zeta) + delta(zeta, eta)). Deterministic
/// in the seed.
pub fn quasimetric_constant(q: &QuasiMetric, n_triples: usize, seed: u64) -> f64 {
    let worst = crate::num::par_map(n_triples, |i| {
        let mut rng = indexed_rng(seed, i as u64);
        let xi = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
        let eta = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
        let zeta = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
        if xi == eta || xi == zeta || zeta == eta {
            return 0.0;
        }
        q.delta(xi, eta) / (q.delta(xi, zeta) + q.delta(zeta, eta))
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    let _ = q.estimated_constant.set(worst);
    worst
}

/// Report the largest epsilon from the sweep that keeps the estimated
/// quasimetric constant at or below 2.
pub fn epsilon_sweep(
    model: &ManifoldModel,
    base: Point,
    candidates: &[f64],
    n_triples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for &eps in candidates {
        let q = QuasiMetric::new(model, base, eps)?;
        out.push((eps, quasimetric_constant(&q, n_triples, seed)));
    }
    Ok(out)
}

/// Empirical kappa of the ultrametric-type inequality
/// (xi|eta) >= min((xi|zeta), (zeta|eta)) - kappa over sampled triples.
pub fn ultrametric_defect(q: &QuasiMetric, n_triples: usize, seed: u64) -> f64 {
    crate::num::par_map(n_triples, |i| {
        let mut rng = indexed_rng(seed, i as u64);
        let xi = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
        let eta = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
        let zeta = BoundaryPoint::new(rng.random_range(0.0..std::f64::consts::TAU));
        if xi == eta || xi == zeta || zeta == eta {
            return 0.0;
        }
        let p = q.product(xi, eta);
        let m = q.product(xi, zeta).min(q.product(zeta, eta));
        (m - p).max(0.0)
    })
    .into_iter()
    .fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_model_closed_delta() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 1.0).unwrap();
        let d = q.delta(BoundaryPoint::new(0.0), BoundaryPoint::new(PI / 2.0));
        assert!((d - (PI / 4.0).sin()).abs() < 1e-12);
        let antipodal = q.delta(BoundaryPoint::new(0.0), BoundaryPoint::new(PI));
        assert!((antipodal - 1.0).abs() < 1e-12);
        let q2 = QuasiMetric::new(&m, Point::ORIGIN, 2.0).unwrap();
        let d2 = q2.delta(BoundaryPoint::new(0.0), BoundaryPoint::new(PI / 2.0));
        assert!((d2 - d * d).abs() < 1e-12, "snowflake power law");
        assert_eq!(q.delta(BoundaryPoint::new(1.0), BoundaryPoint::new(1.0)), 0.0);
    }

    #[test]
    fn constant_constant_is_a_metric() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 1.0).unwrap();
        let k = quasimetric_constant(&q, 20_000, 11);
        assert!(k <= 1.0 + 1e-9, "K-hat = {k}");
        assert!(q.last_estimated_constant().is_some());
    }

    #[test]
    fn degenerate_triple_ratio_below_one() {
        let m = ManifoldModel::constant();
        let q = QuasiMetric::new(&m, Point::ORIGIN, 1.0).unwrap();
        let xi = BoundaryPoint::new(0.3);
        let eta = BoundaryPoint::new(2.0);
        // zeta = xi: ratio = delta / (0 + delta) = 1
        let r = q.delta(xi, eta) / (q.delta(xi, xi) + q.delta(xi, eta));
        assert!(r <= 1.0);
    }

    #[test]
    fn epsilon_must_be_positive() {
        let m = ManifoldModel::constant();
        assert!(QuasiMetric::new(&m, Point::ORIGIN, 0.0).is_err());
    }
}
