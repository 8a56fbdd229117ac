//! Profile and co-profile interpolation by quadrics in `P^3`.
//!
//! A quadric is stored by its ten coefficients in the fixed monomial order
//! [`MONOMIALS`] (lexicographic on index pairs `i ≤ j`):
//!
//! ```text
//! s0², s0s1, s0s2, s0s3, s1², s1s2, s1s3, s2², s2s3, s3²
//! ```
//!
//! Each known point of the surface contributes one linear condition on these
//! coefficients, and the interpolating quadrics span the nullspace of the
//! stacked conditions.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};
use crate::geometry::{Complex64, DoubleAngle};
use crate::measurement::{coprofile_point_from_column, DoubleAngleMatrix, ProjectivePoint};
use crate::tol;

/// Index pairs `(i, j)` of the monomial basis, in storage order.
pub const MONOMIALS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// Tolerance on `| |r| − 1 |` for a diagonal-point chart entry.
pub const CHART_TOL: f64 = 1e-6;

/// Separation of the two line/quadric intersection parameters below which the
/// line counts as tangent.
pub const TANGENT_TOL: f64 = 1e-7;

fn monomials(v: &[Complex64]) -> [Complex64; 10] {
    MONOMIALS.map(|(i, j)| v[i] * v[j])
}

/// Quadratic form `vᵀ Q v` on `P^3`, normalized to unit Frobenius norm with
/// its largest coefficient real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadric {
    coeffs: [Complex64; 10],
}

impl Quadric {
    pub fn from_coefficients(coeffs: [Complex64; 10]) -> Option<Self> {
        let frob = MONOMIALS
            .iter()
            .zip(&coeffs)
            .map(|((i, j), c)| if i == j { c.norm_sqr() } else { 0.5 * c.norm_sqr() })
            .sum::<f64>()
            .sqrt();
        if frob == 0.0 || !frob.is_finite() {
            return None;
        }
        let lead = coeffs
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("ten coefficients");
        let phase = lead.conj() / lead.norm();
        Some(Self { coeffs: coeffs.map(|c| c * phase / frob) })
    }

    pub fn coefficients(&self) -> &[Complex64; 10] {
        &self.coeffs
    }

    /// The symmetric coefficient matrix.
    pub fn matrix(&self) -> Matrix4<Complex64> {
        let mut q = Matrix4::zeros();
        for ((i, j), c) in MONOMIALS.iter().zip(&self.coeffs) {
            if i == j {
                q[(*i, *j)] = *c;
            } else {
                q[(*i, *j)] = c * 0.5;
                q[(*j, *i)] = c * 0.5;
            }
        }
        q
    }

    /// `vᵀQv` at the unit-norm representative of `v`.
    pub fn eval(&self, v: &ProjectivePoint) -> Complex64 {
        self.eval_coords(&v.normalized())
    }

    fn eval_coords(&self, v: &[Complex64]) -> Complex64 {
        monomials(v).iter().zip(&self.coeffs).map(|(m, c)| m * c).sum()
    }

    /// Bilinear form `uᵀQv` on raw coordinates.
    fn polar(&self, u: &[Complex64; 4], v: &[Complex64; 4]) -> Complex64 {
        let q = self.matrix();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += u[i] * q[(i, j)] * v[j];
            }
        }
        acc
    }
}

/// Result of a linear interpolation problem.
#[derive(Debug, Clone)]
pub struct InterpolationResult {
    /// Basis of the solution space (empty when `dimension == 0`).
    pub basis: Vec<Quadric>,
    /// Nullspace dimension; 1 means the quadric is unique.
    pub dimension: usize,
    /// Smallest retained over largest discarded singular value (∞ when
    /// nothing was discarded or the discarded part is exactly zero).
    pub conditioning: f64,
    /// Right singular vector of the smallest singular value; the
    /// least-squares quadric when the data is slightly inconsistent.
    pub least_squares: Quadric,
}

impl InterpolationResult {
    pub fn is_unique(&self) -> bool {
        self.dimension == 1
    }

    /// Largest `|vᵀQv|` over the given points and basis quadrics.
    pub fn max_residual(&self, points: &[ProjectivePoint]) -> f64 {
        self.basis
            .iter()
            .flat_map(|q| points.iter().map(move |p| q.eval(p).norm()))
            .fold(0.0, f64::max)
    }
}

/// The coordinate points of `P^dim` and the all-ones point.
pub fn fixed_profile_points(dim: usize) -> Vec<ProjectivePoint> {
    let n = dim + 1;
    let mut out: Vec<ProjectivePoint> = (0..n)
        .map(|k| {
            let coords: Vec<f64> = (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
            ProjectivePoint::from_real(&coords).expect("coordinate point")
        })
        .collect();
    out.push(ProjectivePoint::from_real(&vec![1.0; n]).expect("all-ones point"));
    out
}

pub fn interpolate_quadric(points: &[ProjectivePoint]) -> Result<InterpolationResult> {
    interpolate_quadric_with(points, tol::RANK)
}

/// Quadrics through `points` (all in `P^3`); singular values below
/// `rank_tol × σ_max` count as zero.
pub fn interpolate_quadric_with(points: &[ProjectivePoint], rank_tol: f64) -> Result<InterpolationResult> {
    if points.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if let Some(bad) = points.iter().find(|p| p.dim() != 3) {
        return Err(Error::InvalidShape(format!("expected points of P^3, got P^{}", bad.dim())));
    }
    let rows = points.len().max(10);
    let mut a = DMatrix::<Complex64>::zeros(rows, 10);
    for (r, p) in points.iter().enumerate() {
        for (c, v) in monomials(&p.normalized()).iter().enumerate() {
            a[(r, c)] = *v;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = sigma[0];
    let rank = if sigma_max == 0.0 {
        0
    } else {
        sigma.iter().filter(|s| **s > rank_tol * sigma_max).count()
    };
    let vector = |k: usize| -> Quadric {
        let row = v_t.row(order[k]);
        let coeffs: [Complex64; 10] = std::array::from_fn(|c| row[c].conj());
        Quadric::from_coefficients(coeffs).expect("unit singular vector")
    };
    let basis: Vec<Quadric> = (rank..10).map(vector).collect();
    let conditioning = match (rank, sigma.get(rank)) {
        (0, _) => 0.0,
        (_, None) => f64::INFINITY,
        (r, Some(&discarded)) if discarded > 0.0 => sigma[r - 1] / discarded,
        _ => f64::INFINITY,
    };
    Ok(InterpolationResult {
        dimension: basis.len(),
        basis,
        conditioning,
        least_squares: vector(9),
    })
}

/// Profile points `(1 : ∠²(a,b) : ∠²(a,c) : ∠²(a,d))` of every measure point
/// for the ordered target tuple `(a, b, c, d)`.
pub fn tuple_rows(m: &DoubleAngleMatrix, tuple: [usize; 4]) -> Vec<ProjectivePoint> {
    let [a, b, c, d] = tuple;
    (0..m.m())
        .map(|j| {
            ProjectivePoint::homogenize(&[
                m.between(j, a, b).value(),
                m.between(j, a, c).value(),
                m.between(j, a, d).value(),
            ])
        })
        .collect()
}

fn check_tuple(m: &DoubleAngleMatrix, tuple: &[usize; 4]) -> Result<()> {
    if tuple.iter().any(|&k| k >= m.t()) || tuple.iter().duplicates().next().is_some() {
        return Err(Error::InvalidShape(format!(
            "tuple {tuple:?} must be 4 distinct target indices below {}",
            m.t()
        )));
    }
    Ok(())
}

/// Interpolation of the profile of an arbitrary ordered 4-tuple of targets,
/// re-referencing the data through `p_1` by the chain rule.
pub fn interpolate_tuple_profile(m: &DoubleAngleMatrix, tuple: [usize; 4]) -> Result<InterpolationResult> {
    check_tuple(m, &tuple)?;
    let mut pts = tuple_rows(m, tuple);
    pts.extend(fixed_profile_points(3));
    interpolate_quadric(&pts)
}

/// The unique profile quadric of an ordered 4-tuple of targets.
///
/// Slightly inconsistent (noisy) data yields the least-squares quadric.
pub fn profile_for_tuple(m: &DoubleAngleMatrix, tuple: [usize; 4]) -> Result<Quadric> {
    let fit = interpolate_tuple_profile(m, tuple)?;
    match fit.dimension {
        0 => Ok(fit.least_squares),
        1 => Ok(fit.basis[0].clone()),
        dimension => Err(Error::NonUniqueProfile { dimension }),
    }
}

/// Profile of a 4-subset whose first entry is the reference target (index 0).
pub fn profile_for_subset(m: &DoubleAngleMatrix, subset: [usize; 4]) -> Result<Quadric> {
    if subset[0] != 0 {
        return Err(Error::MissingReference(subset.to_vec()));
    }
    profile_for_tuple(m, subset)
}

/// Co-profile interpolation from the columns of a three-row matrix.
pub fn interpolate_coprofile(m: &DoubleAngleMatrix) -> Result<InterpolationResult> {
    if m.m() != 3 {
        return Err(Error::InvalidShape(format!("co-profile needs m = 3, got {}", m.m())));
    }
    let mut pts: Vec<ProjectivePoint> =
        (0..m.t() - 1).map(|c| coprofile_point_from_column(&m.column(c))).collect();
    pts.extend(fixed_profile_points(3));
    interpolate_quadric(&pts)
}

/// Which two vertex pairs of the tuple `(a, b, c, d)` span the two lines
/// whose intersection is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalPairing {
    /// Lines `ac` and `bd` (the diagonals of the cyclic order `abcd`).
    AcBd,
    /// Lines `ab` and `cd`.
    AbCd,
    /// Lines `ad` and `bc`.
    AdBc,
}

impl DiagonalPairing {
    /// Spanning vectors `(e, f)` of the projective line in `P^3`; its points
    /// are `e + r f`.
    fn line(self) -> ([Complex64; 4], [Complex64; 4]) {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        match self {
            DiagonalPairing::AcBd => ([l, o, l, o], [o, l, o, l]),
            DiagonalPairing::AbCd => ([l, l, o, o], [o, o, l, l]),
            DiagonalPairing::AdBc => ([l, o, o, l], [o, l, l, o]),
        }
    }
}

/// Measurement `(∠²(a,b), ∠²(a,c), ∠²(a,d))` taken at the intersection point
/// of the paired lines, read off the profile quadric of `(a, b, c, d)`.
///
/// The line of measurements with both paired angles zero meets the quadric at
/// the all-ones point (the image of the point at infinity) and at the image
/// of the intersection point; the root closer to the all-ones point is dropped.
pub fn diagonal_measurement(q: &Quadric, pairing: DiagonalPairing) -> Result<[DoubleAngle; 3]> {
    let (e, f) = pairing.line();
    let c0 = q.polar(&e, &e);
    let c1 = q.polar(&e, &f) * 2.0;
    let c2 = q.polar(&f, &f);
    let scale = c0.norm().max(c1.norm()).max(c2.norm());
    if scale == 0.0 {
        return Err(Error::TangentLine);
    }
    let (c0, c1, c2) = (c0 / scale, c1 / scale, c2 / scale);
    let one = Complex64::new(1.0, 0.0);
    let r = if c2.norm() <= 1e-12 {
        // One intersection escaped to f = (0 : 1 : 0 : 1)-type points.
        if c1.norm() <= 1e-12 {
            return Err(Error::TangentLine);
        }
        let finite = -c0 / c1;
        if (finite - one).norm() < TANGENT_TOL {
            return Err(Error::NonUnitChart { deviation: f64::INFINITY });
        }
        finite
    } else {
        let disc = (c1 * c1 - c2 * c0 * 4.0).sqrt();
        let r1 = (-c1 + disc) / (c2 * 2.0);
        let r2 = (-c1 - disc) / (c2 * 2.0);
        if (r1 - r2).norm() < TANGENT_TOL * (1.0 + r1.norm()) {
            return Err(Error::TangentLine);
        }
        if (r1 - one).norm() < (r2 - one).norm() {
            r2
        } else {
            r1
        }
    };
    let deviation = (r.norm() - 1.0).abs();
    if deviation > CHART_TOL || !deviation.is_finite() {
        return Err(Error::NonUnitChart { deviation });
    }
    let r = DoubleAngle::from_nonzero(r)?;
    let one = DoubleAngle::one();
    Ok(match pairing {
        DiagonalPairing::AcBd => [r, one, r],
        DiagonalPairing::AbCd => [one, r, r],
        DiagonalPairing::AdBc => [r, r, one],
    })
}

/// The profile of `t ≥ 4` targets as the collection of its 4-subset profiles
/// (each subset led by the reference target).
#[derive(Debug, Clone)]
pub struct ProfileModel {
    t: usize,
    quadrics: BTreeMap<[usize; 4], Quadric>,
}

impl ProfileModel {
    pub fn from_matrix(m: &DoubleAngleMatrix) -> Result<Self> {
        if m.t() < 4 {
            return Err(Error::InvalidShape(format!("profile model needs t >= 4, got {}", m.t())));
        }
        let mut quadrics = BTreeMap::new();
        for c in (1..m.t()).combinations(3) {
            let key = [0, c[0], c[1], c[2]];
            quadrics.insert(key, profile_for_subset(m, key)?);
        }
        Ok(Self { t: m.t(), quadrics })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn quadric(&self, subset: &[usize; 4]) -> Option<&Quadric> {
        self.quadrics.get(subset)
    }

    pub fn subsets(&self) -> impl Iterator<Item = &[usize; 4]> {
        self.quadrics.keys()
    }

    /// Largest residual of a measurement chart `(d_2, …, d_t)` over all subset
    /// quadrics; small exactly when the chart lies on the assembled profile.
    pub fn residual(&self, chart: &[Complex64]) -> f64 {
        self.quadrics
            .iter()
            .map(|([_, a, b, c], q)| {
                let v = ProjectivePoint::homogenize(&[chart[a - 1], chart[b - 1], chart[c - 1]]);
                q.eval(&v).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, chart: &[Complex64], tol: f64) -> bool {
        chart.len() + 1 == self.t && self.residual(chart) < tol
    }
}
