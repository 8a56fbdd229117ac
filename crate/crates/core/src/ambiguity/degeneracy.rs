use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::geometry::{are_cocircular, are_collinear, centroid, diameter, PlanarPoint};
use crate::measurement::Configuration;
use crate::tol;

/// Default relative tolerance (fraction of the configuration diameter) for
/// the degeneracy predicates.
pub const DEGENERACY_TOL: f64 = 1e-7;

/// Exponents `(a, b)` of `x^a y^b`, in coefficient order.
pub const CUBIC_MONOMIALS: [(u32, u32); 10] =
    [(3, 0), (2, 1), (1, 2), (0, 3), (2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0)];

/// A real plane cubic through both cyclic points at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicCubic {
    /// Coefficients of [`CUBIC_MONOMIALS`], unit norm, first nonzero positive.
    pub coefficients: [f64; 10],
    /// Fewer than 8 points were given, so the curve is not determined by them.
    pub underdetermined: bool,
}

impl CyclicCubic {
    pub fn eval(&self, p: &PlanarPoint) -> f64 {
        CUBIC_MONOMIALS
            .iter()
            .zip(&self.coefficients)
            .map(|((a, b), c)| c * p.x.powi(*a as i32) * p.y.powi(*b as i32))
            .sum()
    }

    /// Modulus of the homogenized cubic at the cyclic point `(x : y : w) = (1 : i : 0)`.
    pub fn cyclic_residual(&self) -> f64 {
        let i = crate::geometry::Complex64::new(0.0, 1.0);
        CUBIC_MONOMIALS
            .iter()
            .zip(&self.coefficients)
            .filter(|((a, b), _)| a + b == 3)
            .map(|((_, b), c)| i.powu(*b) * *c)
            .sum::<crate::geometry::Complex64>()
            .norm()
    }
}

/// Basis `x(x²+y²), y(x²+y²), x², xy, y², x, y, 1` of real cubics through the
/// cyclic points.
fn basis_row(x: f64, y: f64) -> [f64; 8] {
    let r = x * x + y * y;
    [x * r, y * r, x * x, x * y, y * y, x, y, 1.0]
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients in the original frame of a cubic given in coordinates
/// `u = (x − cx)/s`, `v = (y − cy)/s`.
fn expand(basis: &[f64; 8], cx: f64, cy: f64, s: f64) -> [f64; 10] {
    // The basis vector as coefficients of CUBIC_MONOMIALS in (u, v).
    let [b0, b1, b2, b3, b4, b5, b6, b7] = *basis;
    let local = [b0, b1, b0, b1, b2, b3, b4, b5, b6, b7];
    let mut out = [0.0; 10];
    for ((i, j), c) in CUBIC_MONOMIALS.iter().zip(local) {
        if c == 0.0 {
            continue;
        }
        let scale = c / s.powi((i + j) as i32);
        for a in 0..=*i {
            for b in 0..=*j {
                let coeff = scale
                    * binomial(*i, a)
                    * (-cx).powi((i - a) as i32)
                    * binomial(*j, b)
                    * (-cy).powi((j - b) as i32);
                let k = CUBIC_MONOMIALS.iter().position(|m| *m == (a, b)).expect("degree ≤ 3");
                out[k] += coeff;
            }
        }
    }
    out
}

/// A cyclic cubic through all `points`, if the condition matrix is rank
/// deficient. For fewer than 8 points one always exists and is flagged
/// underdetermined.
pub fn fit_cyclic_cubic(points: &[PlanarPoint], rank_tol: f64) -> Option<CyclicCubic> {
    if points.is_empty() {
        return None;
    }
    let o = centroid(points);
    let s = diameter(points).max(f64::MIN_POSITIVE);
    let rows = points.len().max(8);
    let mut a = DMatrix::<f64>::zeros(rows, 8);
    for (r, p) in points.iter().enumerate() {
        for (c, v) in basis_row((p.x - o.x) / s, (p.y - o.y) / s).iter().enumerate() {
            a[(r, c)] = *v;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma = &svd.singular_values;
    let max = sigma.max();
    let (imin, smin) = sigma.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).expect("eight singular values");
    if points.len() >= 8 && *smin > rank_tol * max {
        return None;
    }
    let row = v_t.row(imin);
    let basis: [f64; 8] = std::array::from_fn(|k| row[k]);
    let mut coefficients = expand(&basis, o.x, o.y, s);
    let n = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    coefficients.iter_mut().for_each(|c| *c /= n);
    if coefficients.iter().find(|c| **c != 0.0).is_some_and(|c| *c < 0.0) {
        coefficients.iter_mut().for_each(|c| *c = -*c);
    }
    Some(CyclicCubic { coefficients, underdetermined: points.len() < 8 })
}

/// A configuration that breaks uniqueness. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "indices", rename_all = "kebab-case")]
pub enum DegeneracyFlag {
    CocircularTargets(Vec<usize>),
    CollinearTargets(Vec<usize>),
    CocircularMeasures(Vec<usize>),
    CollinearMeasures(Vec<usize>),
    /// All target and measure points lie on one cyclic cubic.
    CyclicCubic,
}

impl std::fmt::Display for DegeneracyFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let one_based = |v: &Vec<usize>| v.iter().map(|i| (i + 1).to_string()).join(",");
        match self {
            DegeneracyFlag::CocircularTargets(v) => write!(f, "targets {{{}}} are cocircular", one_based(v)),
            DegeneracyFlag::CollinearTargets(v) => write!(f, "targets {{{}}} are collinear", one_based(v)),
            DegeneracyFlag::CocircularMeasures(v) => write!(f, "measure points {{{}}} are cocircular", one_based(v)),
            DegeneracyFlag::CollinearMeasures(v) => write!(f, "measure points {{{}}} are collinear", one_based(v)),
            DegeneracyFlag::CyclicCubic => write!(f, "all points lie on a cyclic cubic"),
        }
    }
}

fn normalized(pts: &[PlanarPoint], o: &PlanarPoint, s: f64) -> Vec<PlanarPoint> {
    pts.iter().map(|p| PlanarPoint::new((p.x - o.x) / s, (p.y - o.y) / s)).collect()
}

fn subset_flags(
    pts: &[PlanarPoint],
    k: usize,
    tol: f64,
    collinear: fn(Vec<usize>) -> DegeneracyFlag,
    cocircular: fn(Vec<usize>) -> DegeneracyFlag,
) -> Vec<DegeneracyFlag> {
    let mut out = Vec::new();
    for idx in (0..pts.len()).combinations(k) {
        let sub: Vec<PlanarPoint> = idx.iter().map(|&i| pts[i]).collect();
        if are_collinear(&sub, tol) {
            out.push(collinear(idx));
        } else if are_cocircular(&sub, tol).unwrap_or(false) {
            out.push(cocircular(idx));
        }
    }
    out
}

/// The exceptions present in `cfg`: five cocircular or collinear targets,
/// four cocircular or collinear measure points, or all points on a cyclic
/// cubic (checked only when there are at least 8 points). `tol` is relative
/// to the configuration diameter.
pub fn degeneracy_flags(cfg: &Configuration, tol: f64) -> Vec<DegeneracyFlag> {
    let all = cfg.all_points();
    let o = centroid(&all);
    let s = diameter(&all).max(f64::MIN_POSITIVE);
    let targets = normalized(&cfg.targets, &o, s);
    let measures = normalized(&cfg.measures, &o, s);
    let mut flags = subset_flags(&targets, 5, tol, DegeneracyFlag::CollinearTargets, DegeneracyFlag::CocircularTargets);
    flags.extend(subset_flags(&measures, 4, tol, DegeneracyFlag::CollinearMeasures, DegeneracyFlag::CocircularMeasures));
    if all.len() >= 8 && fit_cyclic_cubic(&all, tol::RANK).is_some() {
        flags.push(DegeneracyFlag::CyclicCubic);
    }
    flags
}
