//! Directed and double angles, the measurement map and double angle matrices.
//!
//! The directed angle at `q` from `p1` to `p2` is the unit complex number
//! `(z̄ − w̄₁)(z − w₂) / |(z̄ − w̄₁)(z − w₂)|`; its argument is the oriented
//! angle from ray `q→p1` to ray `q→p2`. Squaring forgets the direction of
//! each ray and leaves the angle modulo π.

use crate::error::{Error, Result};
use crate::geometry::{diameter, Complex64, DirectedAngle, DoubleAngle, PlanarPoint};
use crate::tol;

/// Distance below which a viewpoint is treated as sitting on a target.
pub const COINCIDENCE: f64 = 1e-12;

fn unit(z: Complex64) -> Complex64 {
    z / z.norm()
}

pub fn directed_angle(q: &PlanarPoint, p1: &PlanarPoint, p2: &PlanarPoint) -> Result<DirectedAngle> {
    if q.dist(p1) <= COINCIDENCE || q.dist(p2) <= COINCIDENCE {
        return Err(Error::CoincidentPoints);
    }
    DirectedAngle::from_nonzero((q.z_bar() - p1.z_bar()) * (q.z() - p2.z()))
}

pub fn double_angle(q: &PlanarPoint, p1: &PlanarPoint, p2: &PlanarPoint) -> Result<DoubleAngle> {
    Ok(directed_angle(q, p1, p2)?.squared())
}

/// A point of complex projective space, compared up to nonzero scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<Complex64>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidShape("projective point needs at least 2 coordinates".into()));
        }
        if coords.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidShape("zero vector is not a projective point".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coords })
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `(1 : chart_1 : … : chart_n)`.
    pub fn homogenize(chart: &[Complex64]) -> Self {
        let mut coords = Vec::with_capacity(chart.len() + 1);
        coords.push(Complex64::new(1.0, 0.0));
        coords.extend_from_slice(chart);
        Self { coords }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Dimension of the ambient projective space.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Affine coordinates after dividing by the first coordinate.
    pub fn chart(&self) -> Option<Vec<Complex64>> {
        let lead = self.coords[0];
        if lead.norm() <= 1e-300 {
            return None;
        }
        Some(self.coords[1..].iter().map(|c| c / lead).collect())
    }

    /// Representative of unit Euclidean norm.
    pub fn normalized(&self) -> Vec<Complex64> {
        let n = self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        self.coords.iter().map(|c| c / n).collect()
    }

    /// Sine of the angle between the two representing complex lines.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        if self.coords.len() != other.coords.len() {
            return f64::INFINITY;
        }
        let u = self.normalized();
        let v = other.normalized();
        let inner: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        (1.0 - inner.norm_sqr()).max(0.0).sqrt()
    }

    pub fn approx_eq(&self, other: &ProjectivePoint, tol: f64) -> bool {
        self.distance(other) < tol
    }
}

/// The measurement map: `q ↦ (F_1(z) : … : F_t(z))` with
/// `F_k(z) = (z − w_k) · Π_{i≠k} (z̄ − w̄_i)`.
///
/// All `F_k` share the modulus `Π |z − w_i|`, so every factor is kept at unit
/// modulus and the result has unit-modulus coordinates.
pub fn measurement_map(targets: &[PlanarPoint], q: &PlanarPoint) -> Result<ProjectivePoint> {
    if targets.len() < 2 {
        return Err(Error::InvalidShape("measurement map needs at least 2 targets".into()));
    }
    let mut units = Vec::with_capacity(targets.len());
    for (index, p) in targets.iter().enumerate() {
        if q.dist(p) <= COINCIDENCE {
            return Err(Error::BasePoint { index });
        }
        units.push(unit(q.z() - p.z()));
    }
    let mut conj_product = Complex64::new(1.0, 0.0);
    for u in &units {
        conj_product = unit(conj_product * u.conj());
    }
    let coords = units.iter().map(|u| unit(conj_product * u * u)).collect();
    ProjectivePoint::new(coords)
}

/// Targets and measure points of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub targets: Vec<PlanarPoint>,
    pub measures: Vec<PlanarPoint>,
}

impl Configuration {
    pub fn new(targets: Vec<PlanarPoint>, measures: Vec<PlanarPoint>) -> Result<Self> {
        if targets.len() < 3 {
            return Err(Error::InvalidShape(format!("need t >= 3 targets, got {}", targets.len())));
        }
        if measures.is_empty() {
            return Err(Error::InvalidShape("need m >= 1 measure points".into()));
        }
        if targets.iter().chain(&measures).any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let all: Vec<PlanarPoint> = targets.iter().chain(&measures).copied().collect();
        let eps = COINCIDENCE * diameter(&all).max(1.0);
        for (i, a) in all.iter().enumerate() {
            if all[i + 1..].iter().any(|b| a.dist(b) <= eps) {
                return Err(Error::CoincidentPoints);
            }
        }
        Ok(Self { targets, measures })
    }

    pub fn t(&self) -> usize {
        self.targets.len()
    }

    pub fn m(&self) -> usize {
        self.measures.len()
    }

    /// Targets followed by measure points.
    pub fn all_points(&self) -> Vec<PlanarPoint> {
        self.targets.iter().chain(&self.measures).copied().collect()
    }

    pub fn map_points(&self, f: impl Fn(&PlanarPoint) -> PlanarPoint) -> Self {
        Self {
            targets: self.targets.iter().map(&f).collect(),
            measures: self.measures.iter().map(&f).collect(),
        }
    }
}

macro_rules! angle_matrix {
    ($name:ident, $entry:ident) => {
        /// `m × (t − 1)` matrix; row `j` belongs to measure point `q_{j+1}`,
        /// column `c` to target `p_{c+2}` (reference target `p_1`).
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            t: usize,
            m: usize,
            entries: Vec<$entry>,
        }

        impl $name {
            /// Row-major complex entries; each must be of unit modulus to `ε_unit`.
            pub fn from_complex(t: usize, m: usize, values: &[Complex64]) -> Result<Self> {
                if t < 2 || m < 1 || values.len() != m * (t - 1) {
                    return Err(Error::InvalidShape(format!(
                        "expected {m} x {} entries, got {}",
                        t.saturating_sub(1),
                        values.len()
                    )));
                }
                let cols = t - 1;
                let entries = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        $entry::new(*v).map_err(|_| Error::NonUnitEntry {
                            row: k / cols,
                            col: k % cols,
                            modulus: v.norm(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self { t, m, entries })
            }

            pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
                let m = rows.len();
                let cols = rows.first().map(Vec::len).unwrap_or(0);
                if rows.iter().any(|r| r.len() != cols) {
                    return Err(Error::InvalidShape("ragged rows".into()));
                }
                let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
                Self::from_complex(cols + 1, m, &flat)
            }

            pub fn t(&self) -> usize {
                self.t
            }

            pub fn m(&self) -> usize {
                self.m
            }

            pub fn entry(&self, row: usize, col: usize) -> $entry {
                self.entries[row * (self.t - 1) + col]
            }

            pub fn row(&self, row: usize) -> Vec<$entry> {
                (0..self.t - 1).map(|c| self.entry(row, c)).collect()
            }

            pub fn column(&self, col: usize) -> Vec<$entry> {
                (0..self.m).map(|r| self.entry(r, col)).collect()
            }

            /// Angle at `q_row` from target `a` to target `b` (0-based target
            /// indices), re-referenced through `p_1` by the chain rule.
            pub fn between(&self, row: usize, a: usize, b: usize) -> $entry {
                let at = |k: usize| if k == 0 { $entry::one() } else { self.entry(row, k - 1) };
                at(b) / at(a)
            }

            pub fn values(&self) -> Vec<Complex64> {
                self.entries.iter().map(|e| e.value()).collect()
            }

            pub fn rows_complex(&self) -> Vec<Vec<Complex64>> {
                (0..self.m).map(|r| self.row(r).iter().map(|e| e.value()).collect()).collect()
            }

            /// Largest entrywise distance `|a − b|`; infinite on shape mismatch.
            pub fn max_distance(&self, other: &Self) -> f64 {
                if self.t != other.t || self.m != other.m {
                    return f64::INFINITY;
                }
                self.entries
                    .iter()
                    .zip(&other.entries)
                    .map(|(a, b)| (a.value() - b.value()).norm())
                    .fold(0.0, f64::max)
            }

            /// Keeps the listed rows, in order.
            pub fn select_rows(&self, rows: &[usize]) -> Self {
                let entries = rows.iter().flat_map(|&r| self.row(r)).collect();
                Self { t: self.t, m: rows.len(), entries }
            }
        }
    };
}

angle_matrix!(DoubleAngleMatrix, DoubleAngle);
angle_matrix!(DirectedAngleMatrix, DirectedAngle);

impl DirectedAngleMatrix {
    pub fn squared(&self) -> DoubleAngleMatrix {
        DoubleAngleMatrix {
            t: self.t,
            m: self.m,
            entries: self.entries.iter().map(DirectedAngle::squared).collect(),
        }
    }
}

impl DoubleAngleMatrix {
    /// Matrix of the mirror-image configuration.
    pub fn conj(&self) -> Self {
        Self { t: self.t, m: self.m, entries: self.entries.iter().map(DoubleAngle::conj).collect() }
    }
}

pub fn double_angle_matrix(cfg: &Configuration) -> Result<DoubleAngleMatrix> {
    let p1 = cfg.targets[0];
    let mut entries = Vec::with_capacity(cfg.m() * (cfg.t() - 1));
    for q in &cfg.measures {
        for p in &cfg.targets[1..] {
            entries.push(double_angle(q, &p1, p)?);
        }
    }
    Ok(DoubleAngleMatrix { t: cfg.t(), m: cfg.m(), entries })
}

pub fn directed_angle_matrix(cfg: &Configuration) -> Result<DirectedAngleMatrix> {
    let p1 = cfg.targets[0];
    let mut entries = Vec::with_capacity(cfg.m() * (cfg.t() - 1));
    for q in &cfg.measures {
        for p in &cfg.targets[1..] {
            entries.push(directed_angle(q, &p1, p)?);
        }
    }
    Ok(DirectedAngleMatrix { t: cfg.t(), m: cfg.m(), entries })
}

/// `(1 : d_2 : … : d_t)` in `P^(t−1)`, a point of the profile.
pub fn profile_point_from_row(row: &[DoubleAngle]) -> ProjectivePoint {
    let chart: Vec<Complex64> = row.iter().map(DoubleAngle::value).collect();
    ProjectivePoint::homogenize(&chart)
}

/// `(1 : d_1 : … : d_m)` in `P^m`, a point of the co-profile.
pub fn coprofile_point_from_column(col: &[DoubleAngle]) -> ProjectivePoint {
    let chart: Vec<Complex64> = col.iter().map(DoubleAngle::value).collect();
    ProjectivePoint::homogenize(&chart)
}

/// Checks that every entry of a chart lies on the unit circle.
pub fn chart_is_unit(chart: &[Complex64]) -> bool {
    chart.iter().all(|c| (c.norm() - 1.0).abs() < tol::UNIT)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> PlanarPoint {
        PlanarPoint::new(x, y)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn perpendicular_rays_give_i() {
        let a = directed_angle(&p(0.0, 0.0), &p(1.0, 0.0), &p(0.0, 1.0)).unwrap();
        assert!((a.value() - c(0.0, 1.0)).norm() < 1e-15);
        let d = double_angle(&p(0.0, 0.0), &p(1.0, 0.0), &p(0.0, 1.0)).unwrap();
        assert!((d.value() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn same_and_opposite_rays() {
        let same = directed_angle(&p(0.0, 0.0), &p(1.0, 0.0), &p(2.0, 0.0)).unwrap();
        assert!((same.value() - c(1.0, 0.0)).norm() < 1e-15);
        let opposite = directed_angle(&p(0.0, 0.0), &p(1.0, 0.0), &p(-2.0, 0.0)).unwrap();
        assert!((opposite.value() - c(-1.0, 0.0)).norm() < 1e-15);
        let d = double_angle(&p(0.0, 0.0), &p(1.0, 0.0), &p(-2.0, 0.0)).unwrap();
        assert!((d.value() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn directed_angle_matches_atan2_oracle() {
        let (q, p1, p2) = (p(0.3, 0.7), p(1.0, 0.0), p(0.0, 1.0));
        let theta = (p2.y - q.y).atan2(p2.x - q.x) - (p1.y - q.y).atan2(p1.x - q.x);
        let a = directed_angle(&q, &p1, &p2).unwrap();
        assert!((a.value() - Complex64::from_polar(1.0, theta)).norm() < 1e-14);
    }

    #[test]
    fn coincident_viewpoint_is_an_error() {
        assert_eq!(
            directed_angle(&p(1.0, 0.0), &p(1.0, 0.0), &p(0.0, 1.0)),
            Err(Error::CoincidentPoints)
        );
    }

    #[test]
    fn measurement_map_chart_is_the_double_angle_row() {
        let targets = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)];
        let q = p(1.0, 1.0);
        let chart = measurement_map(&targets, &q).unwrap().chart().unwrap();
        for (k, v) in chart.iter().enumerate() {
            let d = double_angle(&q, &targets[0], &targets[k + 1]).unwrap();
            assert!((v - d.value()).norm() < 1e-14);
        }
        // The raw product formula agrees as well.
        let z = q.z();
        let f = |k: usize| -> Complex64 {
            targets
                .iter()
                .enumerate()
                .map(|(i, w)| if i == k { z - w.z() } else { z.conj() - w.z_bar() })
                .product()
        };
        for k in 1..3 {
            assert!((f(k) / f(0) - chart[k - 1]).norm() < 1e-14);
        }
    }

    #[test]
    fn measurement_map_rejects_base_points() {
        let targets = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)];
        assert_eq!(measurement_map(&targets, &p(1.0, 0.0)), Err(Error::BasePoint { index: 1 }));
    }

    #[test]
    fn far_points_map_near_all_ones() {
        let targets = [p(0.0, 0.0), p(1.0, 0.0), p(0.2, 0.9), p(-0.5, 0.4)];
        for k in 0..8 {
            let t = 0.3 + 0.77 * k as f64;
            let q = p(1e6 * t.cos(), 1e6 * t.sin());
            let chart = measurement_map(&targets, &q).unwrap().chart().unwrap();
            let worst = chart.iter().map(|v| (v - c(1.0, 0.0)).norm()).fold(0.0, f64::max);
            assert!(worst < 1e-4, "ray {k}: {worst}");
        }
    }

    #[test]
    fn matrix_rows_match_measurement_map() {
        let cfg = Configuration::new(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)],
            vec![p(0.5, -0.3), p(2.0, 0.4), p(-0.7, 1.3)],
        )
        .unwrap();
        let m = double_angle_matrix(&cfg).unwrap();
        assert_eq!((m.t(), m.m()), (4, 3));
        for (j, q) in cfg.measures.iter().enumerate() {
            let pt = measurement_map(&cfg.targets, q).unwrap();
            let row = profile_point_from_row(&m.row(j));
            assert!(row.approx_eq(&pt, 1e-12));
        }
    }

    #[test]
    fn square_corner_entries_from_direct_formula() {
        let cfg = Configuration::new(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)],
            vec![p(0.25, 0.6)],
        )
        .unwrap();
        let m = double_angle_matrix(&cfg).unwrap();
        let q = cfg.measures[0].z();
        for (col, w) in cfg.targets[1..].iter().enumerate() {
            let u = q.conj() * (q - w.z());
            let expected = (u / u.norm()).powi(2);
            assert!((m.entry(0, col).value() - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn measure_on_segment_gives_unit_first_column() {
        let cfg = Configuration::new(
            vec![p(0.0, 0.0), p(2.0, 0.0), p(1.0, 1.0)],
            vec![p(0.7, 0.0)],
        )
        .unwrap();
        let m = double_angle_matrix(&cfg).unwrap();
        assert!((m.entry(0, 0).value() - c(1.0, 0.0)).norm() < 1e-15);
        let d = directed_angle_matrix(&cfg).unwrap();
        // Opposite rays: the directed angle is −1, its square 1.
        assert!((d.entry(0, 0).value() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn directed_matrix_squares_to_double_matrix() {
        let cfg = Configuration::new(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(0.3, 0.8), p(-0.2, 0.5)],
            vec![p(0.4, 0.3), p(-1.0, -0.6)],
        )
        .unwrap();
        let directed = directed_angle_matrix(&cfg).unwrap();
        let double = double_angle_matrix(&cfg).unwrap();
        assert!(directed.squared().max_distance(&double) < 1e-14);
        for j in 0..2 {
            for (col, w) in cfg.targets[1..].iter().enumerate() {
                let q = cfg.measures[j];
                let theta = (w.y - q.y).atan2(w.x - q.x) - (0.0 - q.y).atan2(0.0 - q.x);
                assert!((directed.entry(j, col).value() - Complex64::from_polar(1.0, theta)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn row_homogenization_round_trip() {
        let ones = vec![DoubleAngle::one(); 3];
        let pt = profile_point_from_row(&ones);
        assert!(pt.approx_eq(&ProjectivePoint::from_real(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 1e-15));
        let row: Vec<DoubleAngle> =
            [0.3, -1.2, 2.5].iter().map(|&a| DoubleAngle::from_radians(a)).collect();
        let chart = profile_point_from_row(&row).chart().unwrap();
        for (a, b) in chart.iter().zip(&row) {
            assert!((a - b.value()).norm() < 1e-15);
        }
        let col = coprofile_point_from_column(&row);
        assert_eq!(col.dim(), 3);
    }

    #[test]
    fn rejects_non_unit_entries() {
        let err = DoubleAngleMatrix::from_complex(3, 1, &[c(1.0, 0.0), c(0.5, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonUnitEntry { row: 0, col: 1, .. }));
    }

    #[test]
    fn configuration_validation() {
        assert!(matches!(
            Configuration::new(vec![p(0.0, 0.0), p(1.0, 0.0)], vec![p(0.0, 1.0)]),
            Err(Error::InvalidShape(_))
        ));
        assert_eq!(
            Configuration::new(
                vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)],
                vec![p(1.0, 0.0)]
            ),
            Err(Error::CoincidentPoints)
        );
    }
}
