//! Seeded scenario generators.

use clap::ValueEnum;
use itertools::Itertools;
use planar_geodesy::ambiguity::{degeneracy_flags, DEGENERACY_TOL};
use planar_geodesy::geometry::{diameter, fit_generalized_circle};
use planar_geodesy::{Configuration, PlanarPoint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Minimum pairwise distance between generated points.
pub const MIN_SEPARATION: f64 = 0.05;

/// Generic draws keep every four targets, and every four measure points, at
/// least this far (relative to the diameter) from a common circle or line.
pub const GENERIC_MARGIN: f64 = 2e-3;

const MAX_DRAWS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Generic,
    CocircularTargets,
    CocircularMeasures,
    CyclicCubic,
    CollinearTargets,
    Fig2,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Generic => "generic",
            Family::CocircularTargets => "cocircular-targets",
            Family::CocircularMeasures => "cocircular-measures",
            Family::CyclicCubic => "cyclic-cubic",
            Family::CollinearTargets => "collinear-targets",
            Family::Fig2 => "fig2",
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> PlanarPoint {
    PlanarPoint::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn on_circle(rng: &mut ChaCha8Rng, center: PlanarPoint, r: f64) -> PlanarPoint {
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    PlanarPoint::new(center.x + r * a.cos(), center.y + r * a.sin())
}

/// A random line through the square, as a point and a unit direction.
fn random_line(rng: &mut ChaCha8Rng) -> (PlanarPoint, PlanarPoint) {
    let a = rng.random_range(0.0..std::f64::consts::PI);
    let base = PlanarPoint::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
    (base, PlanarPoint::new(a.cos(), a.sin()))
}

fn on_line(rng: &mut ChaCha8Rng, (base, dir): (PlanarPoint, PlanarPoint)) -> PlanarPoint {
    let s = rng.random_range(-1.0..1.0);
    PlanarPoint::new(base.x + s * dir.x, base.y + s * dir.y)
}

fn well_separated(pts: &[PlanarPoint]) -> bool {
    pts.iter().tuple_combinations().all(|(a, b)| a.dist(b) >= MIN_SEPARATION)
}

fn far_from_circles(pts: &[PlanarPoint], scale: f64) -> bool {
    pts.iter()
        .copied()
        .combinations(4)
        .all(|four| fit_generalized_circle(&four).is_ok_and(|(_, worst)| worst > GENERIC_MARGIN * scale))
}

fn is_generic(cfg: &Configuration) -> bool {
    let scale = diameter(&cfg.all_points());
    degeneracy_flags(cfg, DEGENERACY_TOL).is_empty()
        && far_from_circles(&cfg.targets, scale)
        && far_from_circles(&cfg.measures, scale)
}

/// Draws until `accept` holds; `draw` returns targets and measure points.
fn draw_until(
    seed: u64,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> (Vec<PlanarPoint>, Vec<PlanarPoint>),
    accept: impl Fn(&Configuration) -> bool,
) -> Result<Configuration, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let (targets, measures) = draw(&mut rng);
        let all: Vec<PlanarPoint> = targets.iter().chain(&measures).copied().collect();
        if !well_separated(&all) {
            continue;
        }
        if let Ok(cfg) = Configuration::new(targets, measures) {
            if accept(&cfg) {
                return Ok(cfg);
            }
        }
    }
    Err(CliError::Invalid(format!("no acceptable draw after {MAX_DRAWS} attempts")))
}

/// A deterministic scenario of the given family and shape.
pub fn generate(family: Family, t: usize, m: usize, seed: u64) -> Result<Configuration, CliError> {
    if t < 3 {
        return Err(CliError::Invalid(format!("need t >= 3, got {t}")));
    }
    if m < 1 {
        return Err(CliError::Invalid(format!("need m >= 1, got {m}")));
    }
    let center = PlanarPoint::new(0.1, -0.05);
    let radius = 0.8;
    match family {
        Family::Generic => draw_until(
            seed,
            |rng| ((0..t).map(|_| uniform(rng)).collect(), (0..m).map(|_| uniform(rng)).collect()),
            is_generic,
        ),
        Family::CocircularTargets => draw_until(
            seed,
            |rng| {
                ((0..t).map(|_| on_circle(rng, center, radius)).collect(), (0..m).map(|_| uniform(rng)).collect())
            },
            |_| true,
        ),
        Family::CocircularMeasures => draw_until(
            seed,
            |rng| {
                ((0..t).map(|_| uniform(rng)).collect(), (0..m).map(|_| on_circle(rng, center, radius)).collect())
            },
            |_| true,
        ),
        Family::CollinearTargets => draw_until(
            seed,
            |rng| {
                let line = random_line(rng);
                ((0..t).map(|_| on_line(rng, line)).collect(), (0..m).map(|_| uniform(rng)).collect())
            },
            |_| true,
        ),
        Family::CyclicCubic => draw_until(
            seed,
            |rng| {
                let line = random_line(rng);
                let n = t + m;
                let mut pts: Vec<PlanarPoint> = (0..n)
                    .map(|k| if k < n.div_ceil(2) { on_circle(rng, center, radius) } else { on_line(rng, line) })
                    .collect();
                pts.shuffle(rng);
                let measures = pts.split_off(t);
                (pts, measures)
            },
            |_| true,
        ),
        Family::Fig2 => {
            if (t, m) != (4, 4) {
                return Err(CliError::Invalid(format!("fig2 has shape (4, 4), got ({t}, {m})")));
            }
            draw_until(
                seed,
                |rng| {
                    let line = random_line(rng);
                    let targets = (0..4).map(|_| on_circle(rng, center, radius)).collect();
                    let measures = vec![
                        on_circle(rng, center, radius),
                        on_circle(rng, center, radius),
                        on_line(rng, line),
                        on_line(rng, line),
                    ];
                    (targets, measures)
                },
                |_| true,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use planar_geodesy::are_cocircular;

    #[test]
    fn deterministic_for_a_seed() {
        for family in [Family::Generic, Family::CyclicCubic, Family::Fig2] {
            assert_eq!(generate(family, 4, 4, 9).unwrap(), generate(family, 4, 4, 9).unwrap());
        }
        assert_ne!(generate(Family::Generic, 4, 4, 9).unwrap(), generate(Family::Generic, 4, 4, 10).unwrap());
    }

    #[test]
    fn generic_draws_raise_no_flags() {
        let cfg = generate(Family::Generic, 5, 4, 1).unwrap();
        assert!(degeneracy_flags(&cfg, DEGENERACY_TOL).is_empty());
        assert!(well_separated(&cfg.all_points()));
    }

    #[test]
    fn fig2_layout() {
        let cfg = generate(Family::Fig2, 4, 4, 3).unwrap();
        let mut on = cfg.targets.clone();
        on.extend(&cfg.measures[..2]);
        assert!(are_cocircular(&on, 1e-9).unwrap());
        let (c, _) = fit_generalized_circle(&cfg.targets).unwrap();
        assert!(cfg.measures[2..].iter().all(|q| c.distance(q) > 1e-6));
        assert!(generate(Family::Fig2, 5, 4, 3).is_err());
    }

    #[test]
    fn degenerate_families_are_flagged() {
        for (family, t, m) in
            [(Family::CocircularTargets, 5, 4), (Family::CocircularMeasures, 5, 4), (Family::CollinearTargets, 5, 4), (Family::CyclicCubic, 4, 4)]
        {
            let cfg = generate(family, t, m, 2).unwrap();
            assert!(!degeneracy_flags(&cfg, DEGENERACY_TOL).is_empty(), "{family:?}");
        }
    }

    #[test]
    fn too_few_targets() {
        assert!(matches!(generate(Family::Generic, 2, 4, 0), Err(CliError::Invalid(_))));
    }
}
