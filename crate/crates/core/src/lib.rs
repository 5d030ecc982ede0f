//! horolab-core: a numerical laboratory for horosphere geometry on
//! pinched negatively curved surfaces.
//!
//! The crate implements, at desk scale: horocycle curvature through the
//! Riccati equation along geodesics, the curvature-weighted Gromov
//! product and cross ratio on the ideal boundary, the resulting
//! Ahlfors-regular quasimetric with its visual measures, and the
//! log-derivative cocycle of boundary isometries together with Monte
//! Carlo estimates of its Lp growth.

pub mod besov;
pub mod boundary;
pub mod defaults;
pub mod error;
pub mod flow;
pub mod hyperbolic;
pub mod measure;
pub mod models;
pub mod num;

pub use error::{Error, Result};
