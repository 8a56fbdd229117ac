use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    align_similarity, are_cocircular, centroid, circle_through, diameter, orientation, GeneralizedCircle, PlanarPoint,
};
use crate::measurement::{directed_angle, directed_angle_matrix, double_angle, Configuration, DirectedAngleMatrix};
use crate::reconstruct::resection::{resect, resection_quality};

/// Distance to a fundamental circle (relative to the quadrilateral diameter)
/// treated as lying on it.
pub const CURVE_TOL: f64 = 1e-9;

/// Largest `|quotient ∓ 1|` accepted as a sign.
pub const SIGN_TOL: f64 = 0.1;

fn collinear_triple(p: &[PlanarPoint; 4]) -> bool {
    let scale = diameter(p).powi(2);
    (0..4).any(|omit| {
        let t: Vec<&PlanarPoint> = (0..4).filter(|&i| i != omit).map(|i| &p[i]).collect();
        orientation(t[0], t[1], t[2]).abs() <= 1e-9 * scale
    })
}

fn cocircular(p: &[PlanarPoint; 4]) -> bool {
    are_cocircular(p, 1e-10 * diameter(p)).unwrap_or(false)
}

/// True iff the four points are in convex position.
pub fn is_convex(quad: &[PlanarPoint; 4]) -> bool {
    (0..4).all(|i| {
        let t: Vec<&PlanarPoint> = (0..4).filter(|&k| k != i).map(|k| &quad[k]).collect();
        let s = [
            orientation(t[0], t[1], &quad[i]),
            orientation(t[1], t[2], &quad[i]),
            orientation(t[2], t[0], &quad[i]),
        ];
        let inside = s.iter().all(|v| *v > 0.0) || s.iter().all(|v| *v < 0.0);
        !inside
    })
}

/// Intersection of the two diagonals of the convex-hull cyclic ordering, for
/// quadrilaterals in convex position.
pub fn diagonal_intersection(quad: &[PlanarPoint; 4]) -> Option<PlanarPoint> {
    if !is_convex(quad) {
        return None;
    }
    let c = centroid(quad);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| {
        let ta = (quad[a].y - c.y).atan2(quad[a].x - c.x);
        let tb = (quad[b].y - c.y).atan2(quad[b].x - c.x);
        ta.total_cmp(&tb)
    });
    let [a, b, cc, d] = order.map(|i| quad[i]);
    let r1 = (cc.x - a.x, cc.y - a.y);
    let r2 = (d.x - b.x, d.y - b.y);
    let det = r1.0 * r2.1 - r1.1 * r2.0;
    if det == 0.0 {
        return None;
    }
    let s = ((b.x - a.x) * r2.1 - (b.y - a.y) * r2.0) / det;
    Some(PlanarPoint::new(a.x + s * r1.0, a.y + s * r1.1))
}

/// Inside/outside flags for the four fundamental circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RegionSignature(pub [bool; 4]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionLabel {
    Inner,
    Bounded,
    Unbounded,
}

/// The circles `C_1..C_4` through each triple of a non-cocircular
/// quadrilateral; `C_i` omits `p_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalCircles {
    pub quad: [PlanarPoint; 4],
    pub circles: [GeneralizedCircle; 4],
    inner: Option<RegionSignature>,
}

pub fn fundamental_circles(quad: &[PlanarPoint; 4]) -> Result<FundamentalCircles> {
    if collinear_triple(quad) {
        return Err(Error::CollinearTriple);
    }
    if cocircular(quad) {
        return Err(Error::Cocircular);
    }
    let circles = std::array::from_fn(|omit| {
        let t: Vec<PlanarPoint> = (0..4).filter(|&k| k != omit).map(|k| quad[k]).collect();
        circle_through(&t[0], &t[1], &t[2])
    });
    let mut fc = FundamentalCircles { quad: *quad, circles, inner: None };
    fc.inner = diagonal_intersection(quad).and_then(|x| fc.signature(&x).ok());
    Ok(fc)
}

impl FundamentalCircles {
    pub fn tolerance(&self) -> f64 {
        CURVE_TOL * diameter(&self.quad)
    }

    /// Distance from `q` to the nearest fundamental circle.
    pub fn distance(&self, q: &PlanarPoint) -> f64 {
        self.circles.iter().map(|c| c.distance(q)).fold(f64::INFINITY, f64::min)
    }

    pub fn signature(&self, q: &PlanarPoint) -> Result<RegionSignature> {
        if self.distance(q) <= self.tolerance() {
            return Err(Error::OnExceptionalCurve);
        }
        Ok(RegionSignature(self.circles.map(|c| c.contains(q))))
    }

    /// Signature of the inner region (convex quadrilaterals only).
    pub fn inner_signature(&self) -> Option<RegionSignature> {
        self.inner
    }

    pub fn label(&self, sig: &RegionSignature) -> RegionLabel {
        if Some(*sig) == self.inner {
            RegionLabel::Inner
        } else if sig.0.iter().all(|b| !b) {
            RegionLabel::Unbounded
        } else {
            RegionLabel::Bounded
        }
    }

    /// Axis-aligned box containing all circles, with a margin.
    pub fn bounding_box(&self) -> (PlanarPoint, PlanarPoint) {
        let (mut lo, mut hi) = (self.quad[0], self.quad[0]);
        for c in &self.circles {
            if let (Some(ctr), Some(r)) = (c.center(), c.radius()) {
                lo = PlanarPoint::new(lo.x.min(ctr.x - r), lo.y.min(ctr.y - r));
                hi = PlanarPoint::new(hi.x.max(ctr.x + r), hi.y.max(ctr.y + r));
            }
        }
        let pad = 0.1 * (hi.x - lo.x).max(hi.y - lo.y);
        (PlanarPoint::new(lo.x - pad, lo.y - pad), PlanarPoint::new(hi.x + pad, hi.y + pad))
    }

    /// The twelve arcs: `(circle, start angle, end angle)` between consecutive
    /// vertices on each circle, counter-clockwise.
    pub fn arcs(&self) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        for (i, c) in self.circles.iter().enumerate() {
            let Some(ctr) = c.center() else { continue };
            let mut angles: Vec<f64> = (0..4)
                .filter(|&k| k != i)
                .map(|k| (self.quad[k].y - ctr.y).atan2(self.quad[k].x - ctr.x))
                .collect();
            angles.sort_by(f64::total_cmp);
            for k in 0..angles.len() {
                let a = angles[k];
                let b = if k + 1 < angles.len() { angles[k + 1] } else { angles[0] + std::f64::consts::TAU };
                out.push((i, a, b));
            }
        }
        out
    }

    /// Points just inside and just outside the midpoint of each arc.
    pub fn arc_probes(&self) -> Vec<(usize, PlanarPoint, PlanarPoint)> {
        self.arcs()
            .into_iter()
            .filter_map(|(i, a, b)| {
                let c = &self.circles[i];
                let (ctr, r) = (c.center()?, c.radius()?);
                let mid = 0.5 * (a + b);
                let at = |rad: f64| PlanarPoint::new(ctr.x + rad * mid.cos(), ctr.y + rad * mid.sin());
                let eps = 1e-5 * r;
                Some((i, at(r - eps), at(r + eps)))
            })
            .collect()
    }

    /// Signatures realized on an `n × n` grid over the bounding box together
    /// with both sides of every arc midpoint.
    pub fn realized_signatures(&self, n: usize) -> BTreeSet<RegionSignature> {
        let mut out: BTreeSet<RegionSignature> = self.grid_signatures(n);
        for (_, inside, outside) in self.arc_probes() {
            out.extend(self.signature(&inside).ok());
            out.extend(self.signature(&outside).ok());
        }
        out
    }

    /// Signatures realized on an `n × n` grid only.
    pub fn grid_signatures(&self, n: usize) -> BTreeSet<RegionSignature> {
        let (lo, hi) = self.bounding_box();
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                let x = lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / n as f64;
                let y = lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / n as f64;
                out.extend(self.signature(&PlanarPoint::new(x, y)).ok());
            }
        }
        out
    }

    /// Number of arcs bordering the unbounded region.
    pub fn unbounded_boundary_arcs(&self) -> usize {
        let outside = RegionSignature([false; 4]);
        self.arc_probes()
            .iter()
            .filter(|(_, a, b)| [a, b].iter().any(|p| self.signature(p).ok() == Some(outside)))
            .count()
    }

    /// `n` seeded samples from the region with signature `sig` (fewer if the
    /// region is too small to hit within the attempt budget).
    pub fn sample_in_region(&self, sig: &RegionSignature, n: usize, seed: u64) -> Vec<PlanarPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = self.bounding_box();
        let span = (hi.x - lo.x).max(hi.y - lo.y);
        let anchors: Vec<PlanarPoint> = self
            .arc_probes()
            .into_iter()
            .flat_map(|(_, a, b)| [a, b])
            .filter(|p| self.signature(p).ok() == Some(*sig))
            .collect();
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n && attempts < 200 * n + 10_000 {
            attempts += 1;
            let cand = if !anchors.is_empty() && attempts % 2 == 0 {
                let a = anchors[rng.random_range(0..anchors.len())];
                let r = 0.05 * span * rng.random::<f64>().powi(2);
                let th = rng.random_range(0.0..std::f64::consts::TAU);
                PlanarPoint::new(a.x + r * th.cos(), a.y + r * th.sin())
            } else {
                PlanarPoint::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y))
            };
            if self.distance(&cand) > 1e-6 * span && self.signature(&cand).ok() == Some(*sig) {
                out.push(cand);
            }
        }
        out
    }
}

/// Region signature of `q` with respect to the fundamental circles.
pub fn region_signature(q: &PlanarPoint, fc: &FundamentalCircles) -> Result<RegionSignature> {
    fc.signature(q)
}

/// The twin map: the point `q'` seen from the twin quadrilateral under the
/// same double angles as `q` from `quad`.
pub fn twin_map(q: &PlanarPoint, quad: &[PlanarPoint; 4], twin: &[PlanarPoint; 4]) -> Result<PlanarPoint> {
    if cocircular(quad) {
        let (sim, _) = align_similarity(quad, twin, false)?;
        return Ok(sim.apply(q));
    }
    let fc = fundamental_circles(quad)?;
    if fc.distance(q) <= fc.tolerance() {
        return Err(Error::OnExceptionalCurve);
    }
    let d: Vec<_> = (1..4).map(|k| double_angle(q, &quad[0], &quad[k])).collect::<Result<_>>()?;
    let (a, b) = [(1, 2), (1, 3), (2, 3)]
        .into_iter()
        .max_by(|x, y| {
            let qx = resection_quality(&twin[0], &twin[x.0], &twin[x.1], d[x.0 - 1], d[x.1 - 1]);
            let qy = resection_quality(&twin[0], &twin[y.0], &twin[y.1], d[y.0 - 1], d[y.1 - 1]);
            qx.total_cmp(&qy)
        })
        .expect("three pairs");
    let image = resect(&twin[0], &twin[a], &twin[b], d[a - 1], d[b - 1])?;
    let witness = 6 - a - b;
    let residual = (double_angle(&image, &twin[0], &twin[witness])?.value() - d[witness - 1].value()).norm();
    if !(residual < 1e-6) {
        return Err(Error::ValidationFailed { residual });
    }
    Ok(image)
}

/// Sign `φ_i(q) = ∠_{ρ(q)}(p'_1, p'_i) / ∠_q(p_1, p_i)` for the 0-based target
/// index `i ≥ 1`, and the distance of the raw quotient from that sign.
pub fn direction_sign(q: &PlanarPoint, quad: &[PlanarPoint; 4], twin: &[PlanarPoint; 4], i: usize) -> Result<(i8, f64)> {
    if !(1..4).contains(&i) {
        return Err(Error::InvalidShape(format!("target index {i} must be 1, 2 or 3")));
    }
    let image = twin_map(q, quad, twin)?;
    let quotient = directed_angle(&image, &twin[0], &twin[i])?.value() / directed_angle(q, &quad[0], &quad[i])?.value();
    let plus = (quotient - 1.0).norm();
    let minus = (quotient + 1.0).norm();
    if plus <= SIGN_TOL {
        Ok((1, plus))
    } else if minus <= SIGN_TOL {
        Ok((-1, minus))
    } else {
        Err(Error::QuotientNotSign { re: quotient.re, im: quotient.im })
    }
}

/// Candidates whose directed angles reproduce `directed` entrywise to `tol`.
pub fn filter_by_direction(candidates: &[Configuration], directed: &DirectedAngleMatrix, tol: f64) -> Vec<Configuration> {
    candidates
        .iter()
        .filter(|c| directed_angle_matrix(c).is_ok_and(|own| own.max_distance(directed) < tol))
        .cloned()
        .collect()
}
