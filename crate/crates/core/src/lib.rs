//! Reconstruction of planar point configurations from angle measurements.
//!
//! Unknown *target* points `p_1, …, p_t` are observed from unknown *measure*
//! points `q_1, …, q_m`; at each `q_j` the oriented angles between rays to the
//! targets are recorded modulo π. The data is the double angle matrix
//! `M[j][i] = ∠_{q_j}(p_1, p_{i+1})²`, and this crate recovers every
//! configuration (up to orientation-preserving similarity) compatible with it.
//!
//! Modules:
//!
//! * [`geometry`] – points, similarities, generalized circles, predicates.
//! * [`measurement`] – directed and double angles, the measurement map,
//!   double angle matrices, projective points.
//! * [`profile`] – quadric interpolation of profiles and co-profiles and
//!   diagonal-point measurements.
//! * [`reconstruct`] – resection, forward intersection, five-point target
//!   identification, twin quadrilaterals, duality, the numeric enumerator and
//!   the top-level [`reconstruct::solve`].
//! * [`ambiguity`] – degeneracy detection, fundamental circles, region
//!   signatures, the twin map and direction-based filtering.

pub mod ambiguity;
pub mod error;
pub mod geometry;
pub mod measurement;
pub mod profile;
pub mod reconstruct;

pub use error::{Error, Result};
pub use geometry::{
    align_similarity, are_cocircular, are_collinear, circle_through, circumcenter, Complex64,
    DirectedAngle, DoubleAngle, GeneralizedCircle, PlanarPoint, Similarity,
};
pub use measurement::{
    directed_angle, directed_angle_matrix, double_angle, double_angle_matrix, measurement_map,
    Configuration, DirectedAngleMatrix, DoubleAngleMatrix, ProjectivePoint,
};
pub use profile::{InterpolationResult, Quadric};
pub use reconstruct::{solve, SolutionKind, SolutionSet, SolveOptions};

/// Default tolerances for unit-scale data. Every predicate also takes an
/// explicit tolerance so callers can scale by configuration diameter.
pub mod tol {
    /// Allowed deviation of an angle from unit modulus.
    pub const UNIT: f64 = 1e-9;
    /// Relative area below which three points count as collinear.
    pub const COLLINEAR: f64 = 1e-9;
    /// Residual for "point lies on curve" checks.
    pub const RESID: f64 = 1e-9;
    /// Singular values below `RANK × σ_max` count as zero.
    pub const RANK: f64 = 1e-8;
    /// Entrywise agreement of double angle matrices.
    pub const MATCH: f64 = 1e-6;
}
