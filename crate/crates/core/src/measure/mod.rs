//! Boundary measures: visual densities, ball masses and Ahlfors
//! dimension fits, Radon-Nikodym derivatives between base points, the
//! product measure nu = delta^{-2Q} lambda x lambda with its sampler,
//! and quasi-invariance diagnostics.

mod ball;
mod lambda;
mod nu;

pub use ball::{ahlfors_fit, ball_mass, AhlforsFit};
pub use lambda::{lambda_density, rn_lambda, BoundaryMeasure};
pub use nu::{nu_sample_csv, rn_nu, rn_nu_derivative_route, NuMeasure, NuSample};
