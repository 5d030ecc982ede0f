//! The ideal boundary: charts, Busemann cocycles, weighted Gromov
//! products, cross ratios, the visual quasimetric and its metrization,
//! boundary actions of isometries and their derivatives.

pub mod landing;
mod point;
pub(crate) mod products;
mod quasimetric;
pub(crate) mod rays;

mod derivative;
mod frink;

pub use derivative::{
    boundary_action, boundary_action_derivative, boundary_derivative, boundary_map,
    cross_ratio_mult, Derivative,
};
pub use frink::{frink_metrize, FrinkMetric};
pub use point::BoundaryPoint;
pub use products::{
    busemann_cocycle, connect_boundary_points, cross_ratio_add, gromov_product, q_value,
    BoundaryGeodesic, CrossRatio, GromovParams,
};
pub(crate) use products::gromov_product_with_offset;
pub use quasimetric::{
    epsilon_sweep, quasimetric_constant, ultrametric_defect, ProductSource, QuasiMetric,
};

/// Convenience one-off evaluation of delta_{x,eps}(xi, eta).
pub fn quasimetric_value(
    model: &crate::models::ManifoldModel,
    base: crate::models::Point,
    epsilon: f64,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
) -> crate::error::Result<f64> {
    let q = QuasiMetric::new(model, base, epsilon)?;
    Ok(q.delta(xi, eta))
}
