use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::geometry::{DoubleAngle, PlanarPoint};
use crate::measurement::DoubleAngleMatrix;
use crate::profile::{diagonal_measurement, profile_for_tuple, DiagonalPairing};

use super::resection::{intersect_sight_lines, resect, resection_quality};

/// Agreement between two estimates of the same double angle.
const AGREE: f64 = 1e-6;

/// Helper pairs tried per angle before a consensus is taken.
const MAX_HELPERS: usize = 8;

/// Angles among the targets themselves, recovered from the profile data.
pub(crate) struct TargetAngles<'a> {
    m: &'a DoubleAngleMatrix,
    diagonals: HashMap<[usize; 4], Result<DoubleAngle>>,
    angles: HashMap<(usize, usize, usize), Result<DoubleAngle>>,
}

impl<'a> TargetAngles<'a> {
    pub(crate) fn new(m: &'a DoubleAngleMatrix) -> Self {
        Self { m, diagonals: HashMap::new(), angles: HashMap::new() }
    }

    /// `∠²(a, b)` measured at the intersection of the lines `ac` and `bd`.
    fn diagonal(&mut self, tuple: [usize; 4]) -> Result<DoubleAngle> {
        let m = self.m;
        self.diagonals
            .entry(tuple)
            .or_insert_with(|| {
                let q = profile_for_tuple(m, tuple)?;
                diagonal_measurement(&q, DiagonalPairing::AcBd).map(|chart| chart[0])
            })
            .clone()
    }

    /// `∠²` at target `viewer` from target `a` to target `b`.
    ///
    /// With helpers `x, y`, the three diagonal points of `(a,b,x,y)`,
    /// `(a,b,v,y)` and `(a,b,x,v)` see `(a,b)` under angles `α, β, γ`, and the
    /// angle at `v` is `β + γ − α`. Several helper pairs are tried and the
    /// value most of them agree on is returned.
    pub(crate) fn angle(&mut self, viewer: usize, a: usize, b: usize) -> Result<DoubleAngle> {
        if let Some(r) = self.angles.get(&(viewer, a, b)) {
            return r.clone();
        }
        let r = self.compute_angle(viewer, a, b);
        self.angles.insert((viewer, a, b), r.clone());
        r
    }

    fn compute_angle(&mut self, v: usize, a: usize, b: usize) -> Result<DoubleAngle> {
        let others: Vec<usize> = (0..self.m.t()).filter(|k| ![v, a, b].contains(k)).collect();
        if others.len() < 2 {
            return Err(Error::InvalidShape("need at least 5 targets".into()));
        }
        let mut estimates = Vec::new();
        let mut last_err: Option<Error> = None;
        for (x, y) in others.iter().copied().tuple_combinations().flat_map(|(x, y)| [(x, y), (y, x)]) {
            if estimates.len() >= MAX_HELPERS {
                break;
            }
            let est = (|| -> Result<DoubleAngle> {
                let alpha = self.diagonal([a, b, x, y])?;
                let beta = self.diagonal([a, b, v, y])?;
                let gamma = self.diagonal([a, b, x, v])?;
                Ok(beta * gamma / alpha)
            })();
            match est {
                Ok(e) => estimates.push(e),
                Err(e) => last_err = Some(e),
            }
        }
        consensus(&estimates).ok_or_else(|| {
            Error::DegenerateSubset(format!(
                "angle at target {} from {} to {}: {}",
                v + 1,
                a + 1,
                b + 1,
                last_err.map(|e| e.to_string()).unwrap_or_else(|| "no helper subsets".into())
            ))
        })
    }
}

/// The estimate with the most others within [`AGREE`] (first on ties).
fn consensus(estimates: &[DoubleAngle]) -> Option<DoubleAngle> {
    estimates
        .iter()
        .enumerate()
        .max_by_key(|(i, e)| {
            let votes = estimates.iter().filter(|o| (o.value() - e.value()).norm() < AGREE).count();
            (votes, std::cmp::Reverse(*i))
        })
        .map(|(_, e)| *e)
}

/// Targets of a `t ≥ 5`, `m ≥ 4` instance in the frame `p_1 = 0`, `p_2 = 1`.
///
/// Every target is placed by intersecting sight lines from two already placed
/// targets, using angles between targets recovered from diagonal points of
/// 4-subset profiles. Targets collinear with every placed pair are deferred
/// until a non-collinear pair is available.
pub fn identify_targets(m: &DoubleAngleMatrix) -> Result<Vec<PlanarPoint>> {
    let t = m.t();
    if t < 5 || m.m() < 4 {
        return Err(Error::InvalidShape(format!("identify_targets needs t >= 5 and m >= 4, got t = {t}, m = {}", m.m())));
    }
    let mut angles = TargetAngles::new(m);
    let mut pos: Vec<Option<PlanarPoint>> = vec![None; t];
    pos[0] = Some(PlanarPoint::new(0.0, 0.0));
    pos[1] = Some(PlanarPoint::new(1.0, 0.0));
    let mut pending: Vec<usize> = (2..t).collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut still = Vec::new();
        for &k in &pending {
            match place(&mut angles, &pos, k)? {
                Some(x) => pos[k] = Some(x),
                None => still.push(k),
            }
        }
        pending = still;
        if pending.len() == before {
            place_from_measures(m, &mut pos, &pending)?;
            break;
        }
    }
    Ok(pos.into_iter().map(|p| p.expect("all placed")).collect())
}

/// Fallback for targets that no pair of placed targets can see at a usable
/// angle: resect the measure points from the placed targets, then
/// forward-intersect the remaining targets from pairs of measure points.
fn place_from_measures(m: &DoubleAngleMatrix, pos: &mut [Option<PlanarPoint>], pending: &[usize]) -> Result<()> {
    let stuck = || {
        Error::DegenerateSubset(format!(
            "targets {:?} are collinear with every placed pair",
            pending.iter().map(|k| k + 1).collect::<Vec<_>>()
        ))
    };
    let placed: Vec<usize> = (1..pos.len()).filter(|&i| pos[i].is_some()).collect();
    let p1 = pos[0].expect("reference placed");
    let mut measures = Vec::new();
    for row in 0..m.m() {
        let best = placed
            .iter()
            .tuple_combinations()
            .map(|(&a, &b)| {
                let (pa, pb) = (pos[a].unwrap(), pos[b].unwrap());
                let (da, db) = (m.entry(row, a - 1), m.entry(row, b - 1));
                (resection_quality(&p1, &pa, &pb, da, db), pa, pb, da, db)
            })
            .max_by(|x, y| x.0.total_cmp(&y.0));
        match best {
            Some((quality, pa, pb, da, db)) if quality > 0.0 => {
                if let Ok(q) = resect(&p1, &pa, &pb, da, db) {
                    measures.push((row, q));
                }
            }
            _ => {}
        }
    }
    for &k in pending {
        let mut best: Option<(PlanarPoint, f64)> = None;
        for ((r1, q1), (r2, q2)) in measures.iter().tuple_combinations() {
            if let Ok((x, sin)) = intersect_sight_lines(q1, &p1, m.entry(*r1, k - 1), q2, &p1, m.entry(*r2, k - 1)) {
                if best.as_ref().is_none_or(|(_, s)| sin > *s) {
                    best = Some((x, sin));
                }
            }
        }
        let (x, _) = best.filter(|(_, sin)| *sin > 1e-6).ok_or_else(stuck)?;
        pos[k] = Some(x);
    }
    Ok(())
}

/// Intersection angle above which a placement is accepted without searching
/// the remaining pairs.
const GOOD_SIN: f64 = 0.1;

fn place(angles: &mut TargetAngles<'_>, pos: &[Option<PlanarPoint>], k: usize) -> Result<Option<PlanarPoint>> {
    let placed: Vec<usize> = (0..pos.len()).filter(|&i| pos[i].is_some()).collect();
    let mut best: Option<(PlanarPoint, f64)> = None;
    for (&u, &v) in placed.iter().tuple_combinations() {
        let (pu, pv) = (pos[u].unwrap(), pos[v].unwrap());
        let (Ok(du), Ok(dv)) = (angles.angle(u, v, k), angles.angle(v, u, k)) else {
            continue;
        };
        match intersect_sight_lines(&pu, &pv, du, &pv, &pu, dv) {
            Ok((x, sin)) => {
                if best.as_ref().is_none_or(|(_, s)| sin > *s) {
                    best = Some((x, sin));
                }
                if sin > GOOD_SIN {
                    break;
                }
            }
            Err(Error::ParallelLines) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(best.filter(|(_, sin)| *sin > 1e-6).map(|(x, _)| x))
}
