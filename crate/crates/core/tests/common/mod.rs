#![allow(dead_code)]

use itertools::Itertools;
use planar_geodesy::ambiguity::{degeneracy_flags, DEGENERACY_TOL};
use planar_geodesy::geometry::{diameter, fit_generalized_circle};
use planar_geodesy::{Configuration, PlanarPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn p(x: f64, y: f64) -> PlanarPoint {
    PlanarPoint::new(x, y)
}

fn well_spread(pts: &[PlanarPoint], scale: f64) -> bool {
    pts.iter()
        .copied()
        .combinations(4)
        .all(|four| fit_generalized_circle(&four).is_ok_and(|(_, worst)| worst > 2e-3 * scale))
}

/// Random configuration in `[-1, 1]²` with separation 0.05, no flags and no
/// four targets (or four measure points) close to a circle or line.
pub fn generic(t: usize, m: usize, seed: u64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut pts: Vec<PlanarPoint> = Vec::new();
        while pts.len() < t + m {
            let c = p(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if pts.iter().all(|q| q.dist(&c) >= 0.05) {
                pts.push(c);
            }
        }
        let cfg = Configuration::new(pts[..t].to_vec(), pts[t..].to_vec()).unwrap();
        let scale = diameter(&pts);
        if degeneracy_flags(&cfg, DEGENERACY_TOL).is_empty()
            && well_spread(&cfg.targets, scale)
            && well_spread(&cfg.measures, scale)
        {
            return cfg;
        }
    }
}

pub fn quad(cfg: &Configuration) -> [PlanarPoint; 4] {
    [cfg.targets[0], cfg.targets[1], cfg.targets[2], cfg.targets[3]]
}
