//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use geodesy_cli::{census, expected_count, generate, Expected, Family};
use itertools::Itertools;
use planar_geodesy::ambiguity::{
    degeneracy_flags, direction_sign, filter_by_direction, fundamental_circles, is_convex, twin_map, DegeneracyFlag,
    FundamentalCircles, RegionLabel, DEGENERACY_TOL,
};
use planar_geodesy::geometry::{diameter, fit_generalized_circle, orientation};
use planar_geodesy::profile::interpolate_tuple_profile;
use planar_geodesy::reconstruct::{enumerate_numeric, resect, twin_quadrilateral};
use planar_geodesy::{
    align_similarity, circle_through, directed_angle_matrix, double_angle, double_angle_matrix, solve, Configuration,
    DoubleAngleMatrix, Error, PlanarPoint, SolutionKind, SolveOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const INSTANCES: u64 = 20;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn generic(t: usize, m: usize, seed: u64) -> Result<Configuration, String> {
    generate(Family::Generic, t, m, seed).map_err(|e| format!("({t},{m}) seed {seed}: {e}"))
}

fn matrix(cfg: &Configuration) -> DoubleAngleMatrix {
    double_angle_matrix(cfg).expect("generic configurations are measurable")
}

fn rms(a: &Configuration, b: &Configuration) -> f64 {
    align_similarity(&a.all_points(), &b.all_points(), false).map_or(f64::INFINITY, |(_, r)| r)
}

fn uniform(rng: &mut ChaCha8Rng) -> PlanarPoint {
    PlanarPoint::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random quadrilateral with separated vertices, well away from any collinear
/// triple or common circle.
fn random_quad(rng: &mut ChaCha8Rng) -> [PlanarPoint; 4] {
    loop {
        let quad = [uniform(rng), uniform(rng), uniform(rng), uniform(rng)];
        let d = diameter(&quad);
        let separated = quad.iter().tuple_combinations().all(|(a, b)| a.dist(b) > 0.1);
        let fat = quad
            .iter()
            .tuple_combinations()
            .all(|(a, b, c)| orientation(a, b, c).abs() > 0.02 * d * d);
        let off_circle = fit_generalized_circle(&quad).is_ok_and(|(_, r)| r > 0.02 * d);
        if separated && fat && off_circle && fundamental_circles(&quad).is_ok() && twin_quadrilateral(&quad).is_ok() {
            return quad;
        }
    }
}

fn quads(seed: u64, n: usize, convex: Option<bool>) -> Vec<[PlanarPoint; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(|| random_quad(&mut rng))
        .filter(|q| convex.is_none_or(|c| is_convex(q) == c))
        .take(n)
        .collect()
}

/// Every numeric cluster matches a closed-form solution and vice versa.
fn clusters_match(solutions: &[Configuration], clusters: &[Configuration]) -> bool {
    solutions.len() == clusters.len()
        && solutions.iter().all(|s| clusters.iter().any(|c| rms(s, c) < 1e-6))
        && clusters.iter().all(|c| solutions.iter().any(|s| rms(s, c) < 1e-6))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (t, m) in [(5, 4), (6, 5)] {
        for seed in 0..INSTANCES {
            let truth = generic(t, m, seed)?;
            let (set, _) = solve(&matrix(&truth), None, &SolveOptions { seed, ..SolveOptions::default() })
                .map_err(|e| format!("({t},{m}) seed {seed}: {e}"))?;
            check(set.kind == SolutionKind::Unique, || format!("({t},{m}) seed {seed}: {}", set.kind))?;
            let r = rms(&set.solutions[0], &truth);
            check(r < 1e-6, || format!("({t},{m}) seed {seed}: rms {r:.2e}"))?;
            worst = worst.max(r);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!("40 unique, max rms {worst:.1e}, {secs:.2} s"))
}

/// Shared checks for shapes with two solutions.
fn twin_pairs(t: usize, m: usize, distinct: bool) -> Outcome {
    let mut worst_m: f64 = 0.0;
    let mut closest: f64 = f64::INFINITY;
    for seed in 0..INSTANCES {
        let truth = generic(t, m, seed)?;
        let mat = matrix(&truth);
        let (set, _) = solve(&mat, None, &SolveOptions { seed, ..SolveOptions::default() })
            .map_err(|e| format!("seed {seed}: {e}"))?;
        check(set.solutions.len() == 2, || format!("seed {seed}: {} solutions ({})", set.solutions.len(), set.kind))?;
        for s in &set.solutions {
            let d = matrix(s).max_distance(&mat);
            check(d < 1e-6, || format!("seed {seed}: M mismatch {d:.2e}"))?;
            worst_m = worst_m.max(d);
        }
        if distinct {
            let r = align_similarity(&set.solutions[0].all_points(), &set.solutions[1].all_points(), true)
                .map_or(f64::INFINITY, |(_, r)| r);
            check(r > 1e-3, || format!("seed {seed}: twins are similar (rms {r:.2e})"))?;
            closest = closest.min(r);
        }
        let clusters = enumerate_numeric(&mat, 64, seed);
        check(clusters_match(&set.solutions, &clusters), || {
            format!("seed {seed}: numeric enumerator found {} clusters", clusters.len())
        })?;
    }
    let mut msg = format!("20 twin pairs, max M error {worst_m:.1e}, numeric clusters agree");
    if distinct {
        msg.push_str(&format!(", min twin separation {closest:.1e}"));
    }
    Ok(msg)
}

fn criterion_2() -> Outcome {
    twin_pairs(4, 4, true)
}

fn criterion_3() -> Outcome {
    twin_pairs(5, 3, false)
}

fn criterion_4() -> Outcome {
    let shapes = [(4, 3), (4, 4), (5, 3), (5, 4), (6, 4)];
    let wanted = [Expected::Infinite, Expected::Count(2), Expected::Count(2), Expected::Count(1), Expected::Count(1)];
    let file = census(&shapes, INSTANCES as usize, 0, SolveOptions::default().restarts, Family::Generic);
    for (row, want) in file.rows.iter().zip(wanted) {
        check(expected_count(row.t, row.m) == want, || format!("({},{}) expected {want}", row.t, row.m))?;
        check(row.expected == want && row.agreeing == row.instances, || {
            format!("({},{}): {}/{} agree, outcomes {:?}", row.t, row.m, row.agreeing, row.instances, row.outcomes)
        })?;
    }
    Ok("5 shapes x 20 instances, 100% agreement".into())
}

/// Point of the bounding box at least `margin` (relative) away from every
/// fundamental circle.
fn off_circles(fc: &FundamentalCircles, rng: &mut ChaCha8Rng, margin: f64) -> PlanarPoint {
    let (lo, hi) = fc.bounding_box();
    let span = (hi.x - lo.x).max(hi.y - lo.y);
    loop {
        let q = PlanarPoint::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        if fc.distance(&q) > margin * span {
            return q;
        }
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for (k, quad) in quads(50, 10, None).iter().enumerate() {
        let twin = twin_quadrilateral(quad).map_err(|e| format!("quad {k}: {e}"))?;
        let fc = fundamental_circles(quad).map_err(|e| format!("quad {k}: {e}"))?;
        for _ in 0..100 {
            let q = off_circles(&fc, &mut rng, 1e-3);
            let image = twin_map(&q, quad, &twin).map_err(|e| format!("quad {k}: {e}"))?;
            for i in 1..4 {
                let a = double_angle(&q, &quad[0], &quad[i]).map_err(|e| e.to_string())?;
                let b = double_angle(&image, &twin[0], &twin[i]).map_err(|e| e.to_string())?;
                worst = worst.max((a.value() - b.value()).norm());
            }
        }
    }
    check(worst < 1e-8, || format!("max entrywise difference {worst:.2e}"))?;
    Ok(format!("1000 points, max entrywise difference {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, quad) in quads(60, 10, None).iter().enumerate() {
        let twin = twin_quadrilateral(quad).map_err(|e| format!("quad {k}: {e}"))?;
        let back = twin_quadrilateral(&twin).map_err(|e| format!("quad {k} twin: {e}"))?;
        let (_, r) = align_similarity(&back, quad, false).map_err(|e| e.to_string())?;
        check(r < 1e-8, || format!("quad {k}: twin of twin rms {r:.2e}"))?;
        worst = worst.max(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut self_worst: f64 = 0.0;
    for _ in 0..10 {
        let (c, r) = (uniform(&mut rng), rng.random_range(0.5..2.0));
        let mut angles: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let quad: [PlanarPoint; 4] = std::array::from_fn(|i| PlanarPoint::new(c.x + r * angles[i].cos(), c.y + r * angles[i].sin()));
        let twin = twin_quadrilateral(&quad).map_err(|e| format!("cocircular: {e}"))?;
        let (_, res) = align_similarity(&twin, &quad, false).map_err(|e| e.to_string())?;
        self_worst = self_worst.max(res / r);
    }
    check(self_worst < 1e-8, || format!("cocircular twin rms {self_worst:.2e}"))?;
    Ok(format!("involution rms {worst:.1e}, cocircular self-twin rms {self_worst:.1e}"))
}

fn signs(q: &PlanarPoint, quad: &[PlanarPoint; 4], twin: &[PlanarPoint; 4]) -> Result<[i8; 3], Error> {
    Ok([direction_sign(q, quad, twin, 1)?.0, direction_sign(q, quad, twin, 2)?.0, direction_sign(q, quad, twin, 3)?.0])
}

fn criterion_7() -> Outcome {
    let convex = quads(70, 20, Some(true));
    for (k, quad) in convex.iter().enumerate() {
        let twin = twin_quadrilateral(quad).map_err(|e| format!("quad {k}: {e}"))?;
        let fc = fundamental_circles(quad).map_err(|e| format!("quad {k}: {e}"))?;
        let inner = fc.inner_signature().ok_or_else(|| format!("quad {k}: no inner region"))?;
        let samples = fc.sample_in_region(&inner, 50, k as u64);
        check(samples.len() == 50, || format!("quad {k}: only {} inner samples", samples.len()))?;
        for q in &samples {
            let s = signs(q, quad, &twin).map_err(|e| format!("quad {k}: {e}"))?;
            check(s == [1, 1, 1], || format!("quad {k}: signs {s:?} in the inner region"))?;
        }
        let measures: Vec<PlanarPoint> = samples[..4].to_vec();
        let images: Vec<PlanarPoint> =
            measures.iter().map(|q| twin_map(q, quad, &twin)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let original = Configuration::new(quad.to_vec(), measures).map_err(|e| e.to_string())?;
        let mirror = Configuration::new(twin.to_vec(), images).map_err(|e| e.to_string())?;
        let directed = directed_angle_matrix(&original).map_err(|e| e.to_string())?;
        let kept = filter_by_direction(&[original, mirror], &directed, 1e-6);
        check(kept.len() == 2, || format!("quad {k}: filter kept {} of 2", kept.len()))?;
    }

    let mut regions = 0;
    let mut violations = 0;
    for (k, quad) in convex.iter().take(10).enumerate() {
        let twin = twin_quadrilateral(quad).map_err(|e| e.to_string())?;
        let fc = fundamental_circles(quad).map_err(|e| e.to_string())?;
        for sig in fc.realized_signatures(400) {
            let samples = fc.sample_in_region(&sig, 100, 1000 + k as u64);
            check(samples.len() == 100, || format!("quad {k}: region {sig:?} gave {} samples", samples.len()))?;
            let seen: BTreeMap<Option<[i8; 3]>, usize> = samples.iter().map(|q| signs(q, quad, &twin).ok()).counts().into_iter().collect();
            if seen.len() != 1 || seen.contains_key(&None) {
                violations += samples.len() - seen.values().max().copied().unwrap_or(0);
            }
            regions += 1;
        }
    }
    check(regions == 100, || format!("{regions} regions over 10 quadrilaterals"))?;
    check(violations == 0, || format!("{violations} sign violations"))?;
    Ok("1000 inner samples with sign +1, both twins kept; 100 regions x 100 samples, 0 violations".into())
}

fn criterion_8() -> Outcome {
    for convex in [true, false] {
        for (k, quad) in quads(if convex { 80 } else { 81 }, 10, Some(convex)).iter().enumerate() {
            let fc = fundamental_circles(quad).map_err(|e| e.to_string())?;
            let sigs = fc.grid_signatures(400);
            check(sigs.len() == 10, || format!("convex={convex} quad {k}: {} signatures", sigs.len()))?;
            let inner = sigs.iter().filter(|s| fc.label(s) == RegionLabel::Inner).count();
            check(inner == usize::from(convex), || format!("convex={convex} quad {k}: {inner} inner regions"))?;
            let arcs = fc.unbounded_boundary_arcs();
            check((arcs == 2) == convex, || format!("convex={convex} quad {k}: {arcs} unbounded arcs"))?;
        }
    }
    Ok("20 quadrilaterals with 10 regions each; 2 unbounded arcs exactly when convex".into())
}

fn criterion_9() -> Outcome {
    let fig2 = generate(Family::Fig2, 4, 4, 0).map_err(|e| e.to_string())?;
    let dim = interpolate_tuple_profile(&matrix(&fig2), [0, 1, 2, 3]).map_err(|e| e.to_string())?.dimension;
    check(dim >= 2, || format!("fig2 interpolation dimension {dim}"))?;
    let cubic = generate(Family::CyclicCubic, 4, 4, 0).map_err(|e| e.to_string())?;
    let flags = degeneracy_flags(&cubic, DEGENERACY_TOL);
    check(flags.contains(&DegeneracyFlag::CyclicCubic), || format!("cyclic-cubic flags {flags:?}"))?;
    for seed in 0..INSTANCES {
        let cfg = generic(5, 4, seed)?;
        let flags = degeneracy_flags(&cfg, DEGENERACY_TOL);
        check(flags.is_empty(), || format!("generic seed {seed} flags {flags:?}"))?;
    }
    Ok(format!("fig2 dimension {dim}, cyclic cubic flagged, 20 generic unflagged"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut critical = 0;
    while critical < 20 {
        let [a, b, c] = [uniform(&mut rng), uniform(&mut rng), uniform(&mut rng)];
        let circle = circle_through(&a, &b, &c);
        let (Some(ctr), Some(r)) = (circle.center(), circle.radius()) else { continue };
        if r > 5.0 || [a, b, c].iter().tuple_combinations().any(|(x, y)| x.dist(y) < 0.1) {
            continue;
        }
        let angle = |q: &PlanarPoint| (double_angle(q, &a, &b), double_angle(q, &a, &c));
        let th = rng.random_range(0.0..std::f64::consts::TAU);
        let on = PlanarPoint::new(ctr.x + r * th.cos(), ctr.y + r * th.sin());
        if [a, b, c].iter().any(|p| p.dist(&on) < 0.05) {
            continue;
        }
        let (Ok(d12), Ok(d13)) = angle(&on) else { continue };
        let got = resect(&a, &b, &c, d12, d13);
        check(got == Err(Error::OnCriticalCircle), || format!("on-circle resection returned {got:?}"))?;
        critical += 1;

        let off = loop {
            let q = uniform(&mut rng);
            if circle.distance(&q) > 0.05 && [a, b, c].iter().all(|p| p.dist(&q) > 0.05) {
                break q;
            }
        };
        let (Ok(d12), Ok(d13)) = angle(&off) else { continue };
        let back = resect(&a, &b, &c, d12, d13).map_err(|e| format!("off-circle resection: {e}"))?;
        worst = worst.max(back.dist(&off));
    }
    check(worst < 1e-9, || format!("off-circle round trip error {worst:.2e}"))?;
    Ok(format!("20 on-circle points rejected, off-circle round trip {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("unique round trip for (5,4) and (6,5)", criterion_1),
        ("twin pairs for (4,4)", criterion_2),
        ("twin pairs for (5,3)", criterion_3),
        ("solution count census", criterion_4),
        ("twin map preserves measurements", criterion_5),
        ("twin involution and cocircular self-twin", criterion_6),
        ("directed ambiguity in the inner region", criterion_7),
        ("ten regions, unbounded arcs and convexity", criterion_8),
        ("degeneracy detection", criterion_9),
        ("resection on the critical circle", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2} s]", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
