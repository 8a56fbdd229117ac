use crate::error::{Error, Result};
use crate::geometry::{are_cocircular, centroid, circumcenter, diameter, orientation, Complex64, PlanarPoint};
use crate::measurement::{double_angle, double_angle_matrix, measurement_map, Configuration, DoubleAngleMatrix};
use crate::profile::{interpolate_quadric, fixed_profile_points, Quadric};

use super::resection::forward_intersect;

/// Relative triangle area below which three vertices count as collinear.
const COLLINEAR_TOL: f64 = 1e-9;

/// Relative distance from a common circle treated as cocircular.
const COCIRCULAR_TOL: f64 = 1e-10;

/// Profile residual accepted when validating a twin candidate.
const TWIN_TOL: f64 = 1e-7;

pub(crate) fn has_collinear_triple(p: &[PlanarPoint; 4]) -> bool {
    let scale = diameter(p).powi(2);
    (0..4).any(|omit| {
        let tri: Vec<&PlanarPoint> = (0..4).filter(|&i| i != omit).map(|i| &p[i]).collect();
        orientation(tri[0], tri[1], tri[2]).abs() <= COLLINEAR_TOL * scale
    })
}

pub(crate) fn is_cocircular_quad(p: &[PlanarPoint; 4]) -> bool {
    are_cocircular(p, COCIRCULAR_TOL * diameter(p)).unwrap_or(false)
}

/// Viewpoints spread around the quadrilateral, away from its vertices.
fn probe_points(p: &[PlanarPoint; 4]) -> Vec<PlanarPoint> {
    let c = centroid(p);
    let r = diameter(p);
    (0..8)
        .map(|k| {
            let theta = 0.7 + 2.39996 * k as f64;
            let rad = r * (0.37 + 0.61 * ((k * 5 % 8) as f64) / 8.0);
            PlanarPoint::new(c.x + rad * theta.cos(), c.y + rad * theta.sin())
        })
        .collect()
}

fn profile_of(p: &[PlanarPoint; 4]) -> Result<Quadric> {
    let mut pts = Vec::new();
    for q in probe_points(p) {
        if let Ok(v) = measurement_map(p, &q) {
            pts.push(v);
        }
    }
    pts.extend(fixed_profile_points(3));
    let fit = interpolate_quadric(&pts)?;
    match fit.dimension {
        1 => Ok(fit.basis[0].clone()),
        0 => Ok(fit.least_squares),
        dimension => Err(Error::NonUniqueProfile { dimension }),
    }
}

/// Largest residual of measurements of `candidate` on the profile `q`.
fn profile_residual(q: &Quadric, candidate: &[PlanarPoint; 4]) -> f64 {
    probe_points(candidate)
        .iter()
        .filter_map(|x| measurement_map(candidate, x).ok())
        .map(|v| q.eval(&v).norm())
        .fold(0.0, f64::max)
}

/// The twin of a quadrilateral: `p'_i` is the circumcenter of the triangle
/// omitting `p_i`, reflected across the x-axis.
///
/// The twin shares the profile of `p` (equal double angle matrices for
/// corresponding measure points); this is checked on probe measurements and
/// the three double-transposition relabelings are tried if it fails. A
/// cocircular quadrilateral is its own twin.
pub fn twin_quadrilateral(p: &[PlanarPoint; 4]) -> Result<[PlanarPoint; 4]> {
    if has_collinear_triple(p) {
        return Err(Error::CollinearTriple);
    }
    if is_cocircular_quad(p) {
        return Ok(*p);
    }
    let mut centers = [PlanarPoint::new(0.0, 0.0); 4];
    for (omit, c) in centers.iter_mut().enumerate() {
        let tri: Vec<PlanarPoint> = (0..4).filter(|&i| i != omit).map(|i| p[i]).collect();
        *c = circumcenter(&tri[0], &tri[1], &tri[2])?.mirrored();
    }
    let profile = profile_of(p)?;
    let mut best = (f64::INFINITY, centers);
    for perm in [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]] {
        let candidate = perm.map(|i| centers[i]);
        let res = profile_residual(&profile, &candidate);
        if res < TWIN_TOL {
            return Ok(candidate);
        }
        if res < best.0 {
            best = (res, candidate);
        }
    }
    Err(Error::ValidationFailed { residual: best.0 })
}

/// Inversion in the unit circle about `center`.
fn invert(center: Complex64, z: Complex64) -> Complex64 {
    center + (z - center).conj().inv()
}

/// The second solution of a three-measure instance.
///
/// Inverting the measure points about `p_1` exchanges the roles of targets and
/// measure points; the twin of the quadrilateral `(p_1, q_1*, q_2*, q_3*)`,
/// inverted back about its first vertex, gives the new measure points. The
/// remaining targets are forward-intersected from `q'_1, q'_2` and checked
/// against `q'_3`.
pub fn dual_second_solution(sol: &Configuration) -> Result<Configuration> {
    if sol.m() != 3 {
        return Err(Error::InvalidShape(format!("duality needs m = 3, got {}", sol.m())));
    }
    let m = double_angle_matrix(sol)?;
    let c = sol.targets[0].z();
    let dual = [
        sol.targets[0],
        PlanarPoint::from_complex(invert(c, sol.measures[0].z())),
        PlanarPoint::from_complex(invert(c, sol.measures[1].z())),
        PlanarPoint::from_complex(invert(c, sol.measures[2].z())),
    ];
    let twin = twin_quadrilateral(&dual)?;
    let p1 = twin[0];
    let q: Vec<PlanarPoint> = twin[1..].iter().map(|x| PlanarPoint::from_complex(invert(p1.z(), x.z()))).collect();
    let mut targets = vec![p1];
    for col in 0..m.t() - 1 {
        targets.push(forward_intersect(&q[0], &q[1], &p1, m.entry(0, col), m.entry(1, col))?);
    }
    let scale = diameter(&targets).max(f64::MIN_POSITIVE);
    let mut residual: f64 = 0.0;
    for (col, x) in targets[1..].iter().enumerate() {
        let r = if x.dist(&q[2]) <= 1e-12 * scale || x.dist(&p1) <= 1e-12 * scale {
            f64::INFINITY
        } else {
            (double_angle(&q[2], &p1, x)?.value() - m.entry(2, col).value()).norm()
        };
        residual = residual.max(r);
    }
    if !(residual < 1e-6) {
        return Err(Error::ValidationFailed { residual });
    }
    Configuration::new(targets, q).map_err(|_| Error::ValidationFailed { residual: f64::INFINITY })
}

/// Largest entrywise distance between the matrix of `cfg` and `m`.
pub(crate) fn matrix_residual(cfg: &Configuration, m: &DoubleAngleMatrix) -> f64 {
    double_angle_matrix(cfg).map(|own| own.max_distance(m)).unwrap_or(f64::INFINITY)
}
