//! Pinned numerical defaults shared across modules and the CLI.
//!
//! Changing any of these changes experiment output bytes, so they are
//! collected here rather than scattered through call sites.

/// Default truncation horizon for the Riccati mean-curvature solve.
pub const RICCATI_HORIZON: f64 = 15.0;

/// Default local error target for ODE integration.
pub const ODE_TOL: f64 = 1e-10;

/// Default horizon for boundary limits (Busemann offsets, q-values,
/// boundary maps).
pub const BOUNDARY_HORIZON: f64 = 20.0;

/// Backward seeding length used when reading the horosphere curvature
/// along a stored geodesic; the seed error decays like exp(-2a R).
pub const PROFILE_SEED: f64 = 12.0;

/// Default epsilon for the quasimetric on the constant-curvature model
/// (delta is then exactly half the chordal metric).
pub const EPSILON_CONSTANT: f64 = 1.0;

/// Default epsilon on the perturbed model, small enough that the
/// estimated quasimetric constant stays below 2.
pub const EPSILON_PERTURBED: f64 = 0.25;

/// Offset (in radians) of the auxiliary boundary points used by the
/// boundary derivative; +-2pi/3 keeps them far from the evaluation point.
pub const AUX_OFFSET: f64 = 2.0 * std::f64::consts::PI / 3.0;

/// Minimal delta-separation kept when integrating against nu.
pub const NU_CUTOFF: f64 = 1e-3;

/// Cutoff ladder for diagonal-divergence diagnostics.
pub const CUTOFF_LADDER: [f64; 3] = [1e-2, 3e-3, 1e-3];

/// Default Monte Carlo sample count.
pub const MC_SAMPLES: usize = 100_000;

/// Bootstrap resamples for confidence intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 20;

/// Grid resolution (per axis) of the boundary product table on the
/// perturbed model.
pub const PRODUCT_TABLE_N: usize = 96;

/// Rays used to tabulate the direction-to-landing-angle chart map.
pub const LANDING_RAYS: usize = 1024;

/// Integration length after which a ray's landing angle is read off.
pub const LANDING_LENGTH: f64 = 25.0;

/// Default amplitude of the axial conformal bump.
pub const BUMP_AMPLITUDE: f64 = 0.1;

/// Default support radius of the axial conformal bump.
pub const BUMP_SUPPORT: f64 = 1.0;

/// Declared pinching bounds (a, b) for the default perturbed profile;
/// verified against a curvature scan at model construction.
pub const PERTURBED_PINCHING: (f64, f64) = (0.55, 1.20);
