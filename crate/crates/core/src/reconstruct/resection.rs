use crate::error::{Error, Result};
use crate::geometry::{circle_through, Complex64, DoubleAngle, PlanarPoint};

/// Relative size of the 2×2 determinant below which the two circles count as
/// coincident or tangent.
const DET_TOL: f64 = 1e-10;

/// Relative distance to the circumcircle treated as lying on it.
const CRITICAL_TOL: f64 = 1e-9;

/// Measure point from three known targets and its two double angles
/// `d12 = ∠_q(p1,p2)²`, `d13 = ∠_q(p1,p3)²`.
///
/// With `p1` at the origin and `u = 1/z`, each angle gives the linear condition
/// `−w_k·u + d_k·w̄_k·ū = d_k − 1`; the two conditions are solved for `(u, ū)`.
pub fn resect(p1: &PlanarPoint, p2: &PlanarPoint, p3: &PlanarPoint, d12: DoubleAngle, d13: DoubleAngle) -> Result<PlanarPoint> {
    let (u, det_rel) = resect_inverse(p1, p2, p3, d12, d13)?;
    let (w2, w3) = (p2.z() - p1.z(), p3.z() - p1.z());
    let scale = w2.norm().max(w3.norm());
    if u.norm() * scale < 1e-12 {
        return Err(Error::TangentCircles);
    }
    let q = PlanarPoint::from_complex(p1.z() + u.inv());
    let circle = circle_through(p1, p2, p3);
    if det_rel < 1e-6 && circle.distance(&q) < CRITICAL_TOL * scale {
        return Err(Error::OnCriticalCircle);
    }
    Ok(q)
}

/// `1/(q − p1)` and the relative determinant of the resection system.
fn resect_inverse(
    p1: &PlanarPoint,
    p2: &PlanarPoint,
    p3: &PlanarPoint,
    d12: DoubleAngle,
    d13: DoubleAngle,
) -> Result<(Complex64, f64)> {
    let (w2, w3) = (p2.z() - p1.z(), p3.z() - p1.z());
    if w2.norm() == 0.0 || w3.norm() == 0.0 || (w2 - w3).norm() == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let (d2, d3) = (d12.value(), d13.value());
    let one = Complex64::new(1.0, 0.0);
    let det = -w2 * d3 * w3.conj() + w3 * d2 * w2.conj();
    let num_u = (d2 - one) * d3 * w3.conj() - (d3 - one) * d2 * w2.conj();
    let num_v = -w2 * (d3 - one) + w3 * (d2 - one);
    let scale = w2.norm() * w3.norm();
    let det_rel = det.norm() / scale;
    if det_rel < DET_TOL {
        let consistent = num_u.norm() / w2.norm().max(w3.norm()) < 1e-8 && num_v.norm() / w2.norm().max(w3.norm()) < 1e-8;
        return Err(if consistent { Error::OnCriticalCircle } else { Error::TangentCircles });
    }
    Ok((num_u / det, det_rel))
}

/// Conditioning of resecting from `(p1, p2, p3)` with the given angles; larger
/// is better, 0 when the system is singular.
pub(crate) fn resection_quality(
    p1: &PlanarPoint,
    p2: &PlanarPoint,
    p3: &PlanarPoint,
    d12: DoubleAngle,
    d13: DoubleAngle,
) -> f64 {
    match resect_inverse(p1, p2, p3, d12, d13) {
        Ok((u, det_rel)) if u.norm() > 0.0 => det_rel,
        _ => 0.0,
    }
}

/// Intersection of the sight line through `v1` whose direction is turned by
/// `d1` (mod π) from the ray `v1 → r1`, with the analogous line through `v2`.
pub(crate) fn intersect_sight_lines(
    v1: &PlanarPoint,
    r1: &PlanarPoint,
    d1: DoubleAngle,
    v2: &PlanarPoint,
    r2: &PlanarPoint,
    d2: DoubleAngle,
) -> Result<(PlanarPoint, f64)> {
    let dir = |v: &PlanarPoint, r: &PlanarPoint, d: DoubleAngle| -> Result<Complex64> {
        let ray = r.z() - v.z();
        if ray.norm() == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        let ray = ray / ray.norm();
        Ok((d.value() * ray * ray).sqrt())
    };
    let e1 = dir(v1, r1, d1)?;
    let e2 = dir(v2, r2, d2)?;
    let cross = |a: Complex64, b: Complex64| (a.conj() * b).im;
    let sin = cross(e1, e2);
    if sin.abs() < 1e-10 {
        return Err(Error::ParallelLines);
    }
    let s = cross(v2.z() - v1.z(), e2) / sin;
    Ok((PlanarPoint::from_complex(v1.z() + e1 * s), sin.abs()))
}

/// Target from two known measure points and the double angles
/// `d1 = ∠_{q1}(p1,x)²`, `d2 = ∠_{q2}(p1,x)²`, by intersecting the two sight lines.
pub fn forward_intersect(q1: &PlanarPoint, q2: &PlanarPoint, p1: &PlanarPoint, d1: DoubleAngle, d2: DoubleAngle) -> Result<PlanarPoint> {
    if q1.dist(q2) == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    intersect_sight_lines(q1, p1, d1, q2, p1, d2).map(|(x, _)| x)
}
