mod common;

use common::generic;
use planar_geodesy::profile::{interpolate_coprofile, interpolate_tuple_profile};
use planar_geodesy::reconstruct::enumerate_numeric;
use planar_geodesy::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain draws: separation only, no other filtering.
fn separated_draw(t: usize, m: usize, rng: &mut ChaCha8Rng) -> Configuration {
    let mut pts: Vec<PlanarPoint> = Vec::new();
    while pts.len() < t + m {
        let c = PlanarPoint::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if pts.iter().all(|q| q.dist(&c) >= 0.05) {
            pts.push(c);
        }
    }
    Configuration::new(pts[..t].to_vec(), pts[t..].to_vec()).unwrap()
}

#[test]
fn generic_profiles_are_unique() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut profiles = 0;
    let mut coprofiles = 0;
    for _ in 0..100 {
        let m = double_angle_matrix(&separated_draw(4, 4, &mut rng)).unwrap();
        profiles += usize::from(interpolate_tuple_profile(&m, [0, 1, 2, 3]).unwrap().dimension == 1);
        let m = double_angle_matrix(&separated_draw(5, 3, &mut rng)).unwrap();
        coprofiles += usize::from(interpolate_coprofile(&m).unwrap().dimension == 1);
    }
    assert!(profiles >= 95, "t=4, m=4 profiles unique in {profiles}/100");
    assert!(coprofiles >= 95, "t=5, m=3 co-profiles unique in {coprofiles}/100");
}

#[test]
fn numeric_cluster_count_matches_solve() {
    for (t, m, expected) in [(4, 4, 2), (5, 3, 2), (5, 4, 1)] {
        for seed in 0..20 {
            let cfg = generic(t, m, 500 + seed);
            let dm = double_angle_matrix(&cfg).unwrap();
            let (set, _) = solve(&dm, None, &SolveOptions::default()).unwrap();
            let clusters = enumerate_numeric(&dm, 64, seed);
            assert_eq!(set.solutions.len(), expected, "({t},{m}) seed {seed}: {:?}", set.kind);
            assert_eq!(clusters.len(), expected, "({t},{m}) seed {seed}: numeric clusters");
            if expected == 2 {
                let a = double_angle_matrix(&set.solutions[0]).unwrap().values();
                let b = double_angle_matrix(&set.solutions[1]).unwrap().values();
                assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-6));
                let (_, rms) = align_similarity(&set.solutions[0].all_points(), &set.solutions[1].all_points(), false).unwrap();
                assert!(rms > 1e-3, "twin pair related by a similarity: {rms}");
            }
        }
    }
}
