//! Planar primitives: points, similarities, generalized circles and the
//! tolerance-based predicates built on them.
//!
//! Points double as complex numbers `z = x + iy`; most formulas in the crate
//! are written in that form.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub type Complex64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self { x: z.re, y: z.im }
    }

    /// `z = x + iy`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// `z̄ = x − iy`.
    pub fn z_bar(&self) -> Complex64 {
        Complex64::new(self.x, -self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: &PlanarPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn midpoint(&self, other: &PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Reflection across the x-axis.
    pub fn mirrored(&self) -> PlanarPoint {
        PlanarPoint::new(self.x, -self.y)
    }
}

impl From<(f64, f64)> for PlanarPoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self::new(x, y)
    }
}

impl From<Complex64> for PlanarPoint {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when counter-clockwise.
pub fn orientation(a: &PlanarPoint, b: &PlanarPoint, c: &PlanarPoint) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Largest pairwise distance; zero for fewer than two points.
pub fn diameter(pts: &[PlanarPoint]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max(a.dist(b));
        }
    }
    d
}

pub fn centroid(pts: &[PlanarPoint]) -> PlanarPoint {
    let n = pts.len().max(1) as f64;
    PlanarPoint::new(
        pts.iter().map(|p| p.x).sum::<f64>() / n,
        pts.iter().map(|p| p.y).sum::<f64>() / n,
    )
}

/// The map `z ↦ a·z + b`, or `z ↦ a·z̄ + b` when mirrored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale_rotation: Complex64,
    pub translation: Complex64,
    pub mirrored: bool,
}

impl Similarity {
    pub fn identity() -> Self {
        Self {
            scale_rotation: Complex64::new(1.0, 0.0),
            translation: Complex64::new(0.0, 0.0),
            mirrored: false,
        }
    }

    pub fn new(scale_rotation: Complex64, translation: Complex64, mirrored: bool) -> Result<Self> {
        if scale_rotation.norm() == 0.0 || !scale_rotation.norm().is_finite() {
            return Err(Error::DegenerateSource);
        }
        Ok(Self { scale_rotation, translation, mirrored })
    }

    /// The orientation-preserving similarity taking `a` to 0 and `b` to 1.
    pub fn normalizing(a: &PlanarPoint, b: &PlanarPoint) -> Result<Self> {
        let d = b.z() - a.z();
        if d.norm() == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        let s = d.inv();
        Self::new(s, -a.z() * s, false)
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        let z = if self.mirrored { z.conj() } else { z };
        self.scale_rotation * z + self.translation
    }

    pub fn apply(&self, p: &PlanarPoint) -> PlanarPoint {
        PlanarPoint::from_complex(self.apply_complex(p.z()))
    }

    pub fn apply_all(&self, pts: &[PlanarPoint]) -> Vec<PlanarPoint> {
        pts.iter().map(|p| self.apply(p)).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        let (a1, b1) = (self.scale_rotation, self.translation);
        let (a2, b2) = (other.scale_rotation, other.translation);
        if self.mirrored {
            Similarity {
                scale_rotation: a1 * a2.conj(),
                translation: a1 * b2.conj() + b1,
                mirrored: !other.mirrored,
            }
        } else {
            Similarity {
                scale_rotation: a1 * a2,
                translation: a1 * b2 + b1,
                mirrored: other.mirrored,
            }
        }
    }

    pub fn inverse(&self) -> Similarity {
        let (a, b) = (self.scale_rotation, self.translation);
        if self.mirrored {
            let ac = a.conj();
            Similarity {
                scale_rotation: ac.inv(),
                translation: -b.conj() / ac,
                mirrored: true,
            }
        } else {
            Similarity { scale_rotation: a.inv(), translation: -b / a, mirrored: false }
        }
    }
}

/// `A(x² + y²) + Bx + Cy + D = 0`, stored with unit coefficient norm and the
/// first nonzero coefficient positive. `A = 0` encodes a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedCircle {
    coeffs: [f64; 4],
}

impl GeneralizedCircle {
    /// Normalizes `coeffs`; returns `None` for the zero vector.
    pub fn from_coefficients(coeffs: [f64; 4]) -> Option<Self> {
        let n = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        let mut c = coeffs.map(|v| v / n);
        if let Some(first) = c.iter().copied().find(|v| *v != 0.0) {
            if first < 0.0 {
                c = c.map(|v| -v);
            }
        }
        Some(Self { coeffs: c })
    }

    pub fn from_center_radius(center: &PlanarPoint, radius: f64) -> Option<Self> {
        Self::from_coefficients([
            1.0,
            -2.0 * center.x,
            -2.0 * center.y,
            center.norm_sqr() - radius * radius,
        ])
    }

    pub fn coefficients(&self) -> [f64; 4] {
        self.coeffs
    }

    pub fn is_line(&self) -> bool {
        self.coeffs[0] == 0.0
    }

    /// Algebraic value of the defining equation at `p`.
    pub fn eval(&self, p: &PlanarPoint) -> f64 {
        let [a, b, c, d] = self.coeffs;
        a * p.norm_sqr() + b * p.x + c * p.y + d
    }

    pub fn center(&self) -> Option<PlanarPoint> {
        let [a, b, c, _] = self.coeffs;
        (a != 0.0).then(|| PlanarPoint::new(-b / (2.0 * a), -c / (2.0 * a)))
    }

    pub fn radius(&self) -> Option<f64> {
        let [a, b, c, d] = self.coeffs;
        (a != 0.0).then(|| (b * b + c * c - 4.0 * a * d).max(0.0).sqrt() / (2.0 * a.abs()))
    }

    /// Euclidean distance from `p` to the curve.
    pub fn distance(&self, p: &PlanarPoint) -> f64 {
        match (self.center(), self.radius()) {
            (Some(c), Some(r)) => (p.dist(&c) - r).abs(),
            _ => {
                let [_, b, c, d] = self.coeffs;
                (b * p.x + c * p.y + d).abs() / b.hypot(c)
            }
        }
    }

    /// Inside the disk, or on the negative side of a line.
    pub fn contains(&self, p: &PlanarPoint) -> bool {
        self.eval(p) < 0.0
    }
}

/// A unit complex number whose argument is an oriented angle mod 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedAngle(Complex64);

/// The square of a [`DirectedAngle`]; it knows the angle only modulo π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleAngle(Complex64);

macro_rules! unit_complex {
    ($ty:ident) => {
        impl $ty {
            /// Fails unless `| |value| − 1 | < ε_unit`.
            pub fn new(value: Complex64) -> Result<Self> {
                let modulus = value.norm();
                if modulus.is_finite() && (modulus - 1.0).abs() < tol::UNIT {
                    Ok(Self(value / modulus))
                } else {
                    Err(Error::NonUnitEntry { row: 0, col: 0, modulus })
                }
            }

            /// Projects any nonzero complex number onto the unit circle.
            pub fn from_nonzero(value: Complex64) -> Result<Self> {
                let modulus = value.norm();
                if modulus == 0.0 || !modulus.is_finite() {
                    return Err(Error::CoincidentPoints);
                }
                Ok(Self(value / modulus))
            }

            pub fn from_radians(theta: f64) -> Self {
                Self(Complex64::from_polar(1.0, theta))
            }

            pub fn value(&self) -> Complex64 {
                self.0
            }

            pub fn radians(&self) -> f64 {
                self.0.arg()
            }

            pub fn one() -> Self {
                Self(Complex64::new(1.0, 0.0))
            }
        }

        impl std::ops::Mul for $ty {
            type Output = $ty;
            fn mul(self, rhs: $ty) -> $ty {
                let v = self.0 * rhs.0;
                $ty(v / v.norm())
            }
        }

        impl std::ops::Div for $ty {
            type Output = $ty;
            fn div(self, rhs: $ty) -> $ty {
                let v = self.0 * rhs.0.conj();
                $ty(v / v.norm())
            }
        }
    };
}

unit_complex!(DirectedAngle);
unit_complex!(DoubleAngle);

impl DirectedAngle {
    pub fn squared(&self) -> DoubleAngle {
        let v = self.0 * self.0;
        DoubleAngle(v / v.norm())
    }
}

impl DoubleAngle {
    pub fn conj(&self) -> DoubleAngle {
        DoubleAngle(self.0.conj())
    }
}

pub fn circumcenter(a: &PlanarPoint, b: &PlanarPoint, c: &PlanarPoint) -> Result<PlanarPoint> {
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
    let d = 2.0 * (bx * cy - by * cx);
    if scale == 0.0 || d.abs() <= tol::COLLINEAR * scale {
        return Err(Error::CollinearInput);
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Ok(PlanarPoint::new(
        a.x + (cy * b2 - by * c2) / d,
        a.y + (bx * c2 - cx * b2) / d,
    ))
}

/// The generalized circle through three points; a line when they are collinear.
pub fn circle_through(a: &PlanarPoint, b: &PlanarPoint, c: &PlanarPoint) -> GeneralizedCircle {
    // Work in a centered, unit-scale frame and translate back.
    let o = centroid(&[*a, *b, *c]);
    let s = [a, b, c].iter().map(|p| p.dist(&o)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let rows: Vec<[f64; 4]> = [a, b, c]
        .iter()
        .map(|p| {
            let (x, y) = ((p.x - o.x) / s, (p.y - o.y) / s);
            [x * x + y * y, x, y, 1.0]
        })
        .collect();
    let minor = |skip: usize| -> f64 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
        let m = |r: usize, k: usize| rows[r][cols[k]];
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    };
    let mut v = [minor(0), -minor(1), minor(2), -minor(3)];
    if v[0].abs() <= 1e-12 * v[1].hypot(v[2]) {
        v[0] = 0.0;
    }
    // Undo the normalization: u = (p − o) / s.
    let [ua, ub, uc, ud] = v;
    let a2 = ua / (s * s);
    let b2 = ub / s;
    let c2 = uc / s;
    let coeffs = [
        a2,
        b2 - 2.0 * a2 * o.x,
        c2 - 2.0 * a2 * o.y,
        a2 * o.norm_sqr() - b2 * o.x - c2 * o.y + ud,
    ];
    GeneralizedCircle::from_coefficients(coeffs)
        .expect("three distinct points determine a nonzero circle vector")
}

/// Least-squares generalized circle through `pts` together with the largest
/// point-to-curve distance.
pub fn fit_generalized_circle(pts: &[PlanarPoint]) -> Result<(GeneralizedCircle, f64)> {
    if pts.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: pts.len() });
    }
    let o = centroid(pts);
    let s = pts.iter().map(|p| p.dist(&o)).fold(0.0, f64::max);
    if s == 0.0 {
        return Err(Error::DegenerateSource);
    }
    let n = pts.len().max(4);
    let mut design = DMatrix::<f64>::zeros(n, 4);
    for (r, p) in pts.iter().enumerate() {
        let (x, y) = ((p.x - o.x) / s, (p.y - o.y) / s);
        design.set_row(r, &nalgebra::RowVector4::new(x * x + y * y, x, y, 1.0));
    }
    let svd = design.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("four singular values");
    let v = v_t.row(imin);
    let mut u = [v[0], v[1], v[2], v[3]];
    if u[0].abs() <= 1e-12 * u[1].hypot(u[2]) {
        u[0] = 0.0;
    }
    let a2 = u[0] / (s * s);
    let b2 = u[1] / s;
    let c2 = u[2] / s;
    let coeffs = [
        a2,
        b2 - 2.0 * a2 * o.x,
        c2 - 2.0 * a2 * o.y,
        a2 * o.norm_sqr() - b2 * o.x - c2 * o.y + u[3],
    ];
    let circle = GeneralizedCircle::from_coefficients(coeffs).ok_or(Error::DegenerateSource)?;
    let worst = pts.iter().map(|p| circle.distance(p)).fold(0.0, f64::max);
    Ok((circle, worst))
}

/// True iff one generalized circle passes within `tol` of every point.
/// Collinear inputs count (the line is a generalized circle).
pub fn are_cocircular(pts: &[PlanarPoint], tol: f64) -> Result<bool> {
    if pts.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: pts.len() });
    }
    match fit_generalized_circle(pts) {
        Ok((_, worst)) => Ok(worst < tol),
        Err(Error::DegenerateSource) => Ok(true),
        Err(e) => Err(e),
    }
}

/// True iff all points lie within `tol` of their total-least-squares line.
pub fn are_collinear(pts: &[PlanarPoint], tol: f64) -> bool {
    if pts.len() <= 2 {
        return true;
    }
    let o = centroid(pts);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (x, y) = (p.x - o.x, p.y - o.y);
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (nx, ny) = (-theta.sin(), theta.cos());
    pts.iter().map(|p| ((p.x - o.x) * nx + (p.y - o.y) * ny).abs()).all(|d| d < tol)
}

fn fit_complex(source: &[Complex64], target: &[Complex64]) -> Result<(Complex64, Complex64, f64)> {
    let n = source.len() as f64;
    let ms = source.iter().sum::<Complex64>() / n;
    let mt = target.iter().sum::<Complex64>() / n;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (s, t) in source.iter().zip(target) {
        let sc = s - ms;
        num += sc.conj() * (t - mt);
        den += sc.norm_sqr();
    }
    if den == 0.0 {
        return Err(Error::DegenerateSource);
    }
    let a = num / den;
    let b = mt - a * ms;
    let sse: f64 = source.iter().zip(target).map(|(s, t)| (a * s + b - t).norm_sqr()).sum();
    Ok((a, b, (sse / n).sqrt()))
}

/// Least-squares similarity taking `source` onto `target`, and the RMS
/// distance between the mapped source and the target.
pub fn align_similarity(
    source: &[PlanarPoint],
    target: &[PlanarPoint],
    allow_mirror: bool,
) -> Result<(Similarity, f64)> {
    if source.len() != target.len() {
        return Err(Error::InvalidShape(format!(
            "tuple lengths differ ({} vs {})",
            source.len(),
            target.len()
        )));
    }
    if source.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: source.len() });
    }
    let s: Vec<Complex64> = source.iter().map(PlanarPoint::z).collect();
    let t: Vec<Complex64> = target.iter().map(PlanarPoint::z).collect();
    if t.iter().all(|z| *z == t[0]) {
        return Err(Error::DegenerateTarget);
    }
    let mut best: Option<(Similarity, f64)> = None;
    for mirrored in [false, true] {
        if mirrored && !allow_mirror {
            break;
        }
        let src: Vec<Complex64> = if mirrored { s.iter().map(|z| z.conj()).collect() } else { s.clone() };
        let (a, b, rms) = fit_complex(&src, &t)?;
        if a.norm() > 0.0 && best.as_ref().is_none_or(|(_, r)| rms < *r) {
            best = Some((Similarity { scale_rotation: a, translation: b, mirrored }, rms));
        }
    }
    best.ok_or(Error::DegenerateTarget)
}
