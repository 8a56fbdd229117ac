//! Degeneracy detection and the analysis of directed-angle ambiguity between
//! a quadrilateral and its twin.

pub mod degeneracy;
pub mod regions;

pub use degeneracy::{degeneracy_flags, fit_cyclic_cubic, CyclicCubic, DegeneracyFlag, DEGENERACY_TOL};
pub use regions::{
    diagonal_intersection, direction_sign, filter_by_direction, fundamental_circles, is_convex, region_signature,
    twin_map, FundamentalCircles, RegionLabel, RegionSignature,
};
