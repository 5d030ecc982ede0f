//! The two desk-scale Hadamard surfaces and their basic geometry:
//! metric and curvature evaluation, geodesic flow, distances and
//! isometries.

mod distance;
mod geodesic;
mod isometry;
mod model;
mod point;

pub use distance::distance;
pub(crate) use distance::{closest_approach, cosh_dist_m1, distance_to_polar, hyp_dist, PolarPos};
pub use geodesic::{geodesic_evolve, geodesic_evolve_with_path, GeodesicPath, PathSample};
pub(crate) use geodesic::{trace, ChartState, MAX_CHART_DISTANCE};
pub use isometry::{
    isometry_apply, isometry_apply_tangent, isometry_classify, Classification, IsometryClass,
    IsometryElement,
};
pub use model::{ConformalProfile, ManifoldModel, ModelDescriptor, ModelKind};
pub use point::{Point, TangentVector, UnitTangent};

/// Gauss curvature at a chart point; domain error outside the chart.
pub fn curvature_at(model: &ManifoldModel, p: Point) -> crate::error::Result<f64> {
    model.curvature_at(p)
}
