use itertools::Itertools;

use crate::ambiguity::{degeneracy_flags, filter_by_direction, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::geometry::{orientation, PlanarPoint, Similarity};
use crate::measurement::{Configuration, DirectedAngleMatrix, DoubleAngleMatrix};
use crate::profile::{interpolate_coprofile, interpolate_tuple_profile};

use super::identify::identify_targets;
use super::numeric::{enumerate, same_solution, single_run};
use super::resection::{resect, resection_quality};
use super::twin::{dual_second_solution, is_cocircular_quad, matrix_residual, twin_quadrilateral};
use super::{Branch, Diagnostics, DirectionFilterOutcome, ReconstructionReport, SolutionKind, SolutionSet, SolveOptions};

/// The configuration moved by the orientation-preserving similarity taking
/// `p_1` to `(0,0)` and `p_2` to `(1,0)`.
pub fn canonicalize(cfg: &Configuration) -> Result<Configuration> {
    let s = Similarity::normalizing(&cfg.targets[0], &cfg.targets[1])?;
    Ok(Configuration { targets: s.apply_all(&cfg.targets), measures: s.apply_all(&cfg.measures) })
}

/// Measure points of every row of `m`, resected against known targets using
/// the best-conditioned pair of targets besides `p_1`.
pub fn resect_measures(targets: &[PlanarPoint], m: &DoubleAngleMatrix) -> Result<Vec<PlanarPoint>> {
    if targets.len() != m.t() || m.t() < 3 {
        return Err(Error::InvalidShape(format!("{} targets for a matrix with t = {}", targets.len(), m.t())));
    }
    (0..m.m())
        .map(|row| {
            let (a, b) = (1..m.t())
                .tuple_combinations()
                .max_by(|x: &(usize, usize), y: &(usize, usize)| {
                    let q = |(a, b): (usize, usize)| {
                        resection_quality(&targets[0], &targets[a], &targets[b], m.entry(row, a - 1), m.entry(row, b - 1))
                    };
                    q(*x).total_cmp(&q(*y))
                })
                .expect("t ≥ 3");
            resect(&targets[0], &targets[a], &targets[b], m.entry(row, a - 1), m.entry(row, b - 1))
        })
        .collect()
}

/// Errors meaning the data sits in one of the degenerate situations rather
/// than being wrong.
fn is_degeneracy(e: &Error) -> bool {
    matches!(
        e,
        Error::NonUniqueProfile { .. }
            | Error::TangentLine
            | Error::NonUnitChart { .. }
            | Error::TangentCircles
            | Error::OnCriticalCircle
            | Error::ParallelLines
            | Error::DegenerateSubset(_)
            | Error::CollinearTriple
            | Error::Cocircular
            | Error::ValidationFailed { .. }
            | Error::CoincidentPoints
            | Error::BasePoint { .. }
    )
}

fn set(kind: SolutionKind, solutions: Vec<Configuration>, m: &DoubleAngleMatrix) -> SolutionSet {
    let residuals = solutions.iter().map(|c| matrix_residual(c, m)).collect();
    SolutionSet { kind, solutions, diagnostics: Diagnostics { residuals, ..Diagnostics::default() } }
}

fn degenerate(reason: String, samples: Vec<Configuration>, m: &DoubleAngleMatrix) -> SolutionSet {
    let mut s = set(SolutionKind::DegenerateAmbiguous, samples, m);
    s.diagnostics.reasons.push(reason);
    s
}

/// Orders a pair so the first solution has `p_1, p_2, p_3` counter-clockwise
/// (ties by coordinates).
fn order_pair(a: Configuration, b: Configuration) -> [Configuration; 2] {
    let key = |c: &Configuration| {
        let o = orientation(&c.targets[0], &c.targets[1], &c.targets[2]);
        (o <= 0.0, c.all_points().iter().flat_map(|p| [p.x, p.y]).collect::<Vec<f64>>())
    };
    let (ka, kb) = (key(&a), key(&b));
    let a_first = match ka.0.cmp(&kb.0) {
        std::cmp::Ordering::Equal => ka.1.iter().zip(&kb.1).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal).is_le(),
        o => o.is_lt(),
    };
    if a_first {
        [a, b]
    } else {
        [b, a]
    }
}

fn check(cfg: &Configuration, m: &DoubleAngleMatrix, tol: f64) -> Result<f64> {
    let residual = matrix_residual(cfg, m);
    if residual < tol {
        Ok(residual)
    } else {
        Err(Error::InconsistentAngles { residual })
    }
}

/// Solution pair of a four-target instance: a numeric solution and its twin.
pub fn identify_quadrilateral(m: &DoubleAngleMatrix, opts: &SolveOptions) -> Result<SolutionSet> {
    identify_quadrilateral_with_report(m, opts, None)
}

fn identify_quadrilateral_with_report(
    m: &DoubleAngleMatrix,
    opts: &SolveOptions,
    mut report: Option<&mut ReconstructionReport>,
) -> Result<SolutionSet> {
    if m.t() != 4 || m.m() < 4 {
        return Err(Error::InvalidShape(format!("quadrilateral branch needs t = 4, m >= 4, got t = {}, m = {}", m.t(), m.m())));
    }
    let found = enumerate(m, opts.restarts, opts.seed);
    if let Some(r) = report.as_mut() {
        r.numeric_clusters = Some(found.solutions.len());
        r.record("numeric", found.best_residual);
    }
    let first = found
        .solutions
        .first()
        .ok_or(Error::NoSolutionFound { restarts: opts.restarts, best_residual: found.best_residual })?
        .config
        .clone();
    let quad: [PlanarPoint; 4] = first.targets.clone().try_into().expect("four targets");
    if is_cocircular_quad(&quad) {
        return Ok(set(SolutionKind::Unique, vec![first], m));
    }
    let twin = twin_quadrilateral(&quad)?;
    let s = Similarity::normalizing(&twin[0], &twin[1])?;
    let targets = s.apply_all(&twin);
    let measures = resect_measures(&targets, m)?;
    let second = Configuration::new(targets, measures)?;
    let residual = check(&second, m, opts.tol).map_err(|e| match e {
        Error::InconsistentAngles { residual } => Error::ValidationFailed { residual },
        e => e,
    })?;
    if let Some(r) = report.as_mut() {
        r.record("twin", residual);
    }
    if same_solution(&first, &second) {
        return Ok(set(SolutionKind::Unique, vec![first], m));
    }
    let pair = order_pair(first, second);
    Ok(set(SolutionKind::TwinPair, pair.to_vec(), m))
}

fn duality_branch(m: &DoubleAngleMatrix, opts: &SolveOptions, report: &mut ReconstructionReport) -> Result<SolutionSet> {
    let found = enumerate(m, opts.restarts, opts.seed);
    report.numeric_clusters = Some(found.solutions.len());
    report.record("numeric", found.best_residual);
    let first = found
        .solutions
        .first()
        .ok_or(Error::NoSolutionFound { restarts: opts.restarts, best_residual: found.best_residual })?
        .config
        .clone();
    let second = canonicalize(&dual_second_solution(&first)?)?;
    let residual = check(&second, m, opts.tol).map_err(|e| match e {
        Error::InconsistentAngles { residual } => Error::ValidationFailed { residual },
        e => e,
    })?;
    report.record("dual", residual);
    if same_solution(&first, &second) {
        return Ok(set(SolutionKind::Unique, vec![first], m));
    }
    Ok(set(SolutionKind::TwinPair, order_pair(first, second).to_vec(), m))
}

fn five_point_branch(m: &DoubleAngleMatrix, opts: &SolveOptions, report: &mut ReconstructionReport) -> Result<SolutionSet> {
    let targets = identify_targets(m)?;
    let measures = resect_measures(&targets, m)?;
    let cfg = Configuration::new(targets, measures)?;
    let residual = check(&cfg, m, opts.tol)?;
    report.record("five-point", residual);
    Ok(set(SolutionKind::Unique, vec![cfg], m))
}

/// A single configuration reproducing `m`, for shapes with infinitely many.
fn sample_solution(m: &DoubleAngleMatrix, opts: &SolveOptions) -> Option<Configuration> {
    if m.t() < 3 {
        return None;
    }
    (0..opts.restarts.clamp(1, 16)).find_map(|i| single_run(m, opts.seed, i).0.map(|s| s.config))
}

/// Every configuration compatible with `m` (up to orientation-preserving
/// similarity), following the case analysis on the shape `(t, m)`:
///
/// * fewer equations than unknowns, `(m−2)(t−3) < 2`: infinitely many;
/// * `t ≥ 5`, `m ≥ 4`: unique, targets from diagonal points;
/// * `t = 4`, `m ≥ 4`: a numeric solution and its twin quadrilateral;
/// * `m = 3`, `t ≥ 5`: a numeric solution and its dual.
///
/// Non-unique profiles and the exceptional point positions give
/// [`SolutionKind::DegenerateAmbiguous`]. A directed matrix, if given, removes
/// candidates whose directed angles disagree.
pub fn solve(
    m: &DoubleAngleMatrix,
    directed: Option<&DirectedAngleMatrix>,
    opts: &SolveOptions,
) -> Result<(SolutionSet, ReconstructionReport)> {
    let (t, mm) = (m.t(), m.m());
    if t < 3 || mm < 1 {
        return Err(Error::InvalidShape(format!("need t >= 3 and m >= 1, got t = {t}, m = {mm}")));
    }
    if let Some(d) = directed {
        if d.t() != t || d.m() != mm {
            return Err(Error::InvalidShape("directed matrix shape differs from the double angle matrix".into()));
        }
    }
    let excess = (mm as i64 - 2) * (t as i64 - 3) - 2;
    let branch = if excess < 0 {
        Branch::ParameterCount
    } else if t == 4 {
        Branch::Quadrilateral
    } else if mm == 3 {
        Branch::Duality
    } else {
        Branch::FivePoint
    };
    let mut report = ReconstructionReport { t, m: mm, excess, branch, stages: Vec::new(), numeric_clusters: None };

    if branch == Branch::ParameterCount {
        let samples: Vec<Configuration> = sample_solution(m, opts).into_iter().collect();
        let mut s = set(SolutionKind::Infinite, samples, m);
        s.diagnostics.reasons.push(format!(
            "(m-2)(t-3) = {} < 2: fewer independent angles than unknown coordinates",
            excess + 2
        ));
        return Ok((s, report));
    }

    let dimension = if mm == 3 {
        interpolate_coprofile(m)?.dimension
    } else {
        interpolate_tuple_profile(m, [0, 1, 2, 3])?.dimension
    };
    report.record("interpolation-dimension", dimension as f64);
    if dimension > 1 {
        let what = if mm == 3 { "co-profile" } else { "profile" };
        return Ok((degenerate(format!("{what} is not unique (dimension {dimension})"), Vec::new(), m), report));
    }

    let attempt = match branch {
        Branch::FivePoint => five_point_branch(m, opts, &mut report),
        Branch::Quadrilateral => identify_quadrilateral_with_report(m, opts, Some(&mut report)),
        Branch::Duality => duality_branch(m, opts, &mut report),
        Branch::ParameterCount => unreachable!(),
    };
    let mut out = match attempt {
        Ok(s) => s,
        Err(e) if is_degeneracy(&e) => degenerate(format!("{} branch: {e}", branch.name()), Vec::new(), m),
        Err(e) => return Err(e),
    };

    if let Some(first) = out.solutions.first() {
        let flags = degeneracy_flags(first, DEGENERACY_TOL);
        if !flags.is_empty() {
            out.kind = SolutionKind::DegenerateAmbiguous;
            out.diagnostics.reasons.extend(flags.iter().map(|f| f.to_string()));
            out.diagnostics.flags = flags;
        }
    }

    if let Some(d) = directed {
        let before = out.solutions.len();
        out.solutions = filter_by_direction(&out.solutions, d, opts.tol);
        out.diagnostics.residuals = out.solutions.iter().map(|c| matrix_residual(c, m)).collect();
        out.diagnostics.direction_filter = Some(DirectionFilterOutcome { candidates: before, retained: out.solutions.len() });
        if out.kind == SolutionKind::TwinPair && out.solutions.len() == 1 {
            out.kind = SolutionKind::Unique;
        }
        if out.solutions.is_empty() && before > 0 {
            out.diagnostics.reasons.push("no candidate reproduces the directed angles".into());
        }
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::align_similarity;
    use crate::measurement::{directed_angle_matrix, double_angle_matrix};

    fn p(x: f64, y: f64) -> PlanarPoint {
        PlanarPoint::new(x, y)
    }

    fn cfg(targets: &[(f64, f64)], measures: &[(f64, f64)]) -> Configuration {
        Configuration::new(targets.iter().map(|&q| q.into()).collect(), measures.iter().map(|&q| q.into()).collect()).unwrap()
    }

    #[test]
    fn unique_shape_round_trip() {
        let c = cfg(
            &[(0.1, 0.2), (1.0, -0.3), (0.8, 0.7), (-0.2, 0.9), (0.4, -0.6)],
            &[(1.5, 1.2), (-1.1, 0.3), (0.3, 2.0), (-0.6, -1.4)],
        );
        let (s, r) = solve(&double_angle_matrix(&c).unwrap(), None, &SolveOptions::default()).unwrap();
        assert_eq!(s.kind, SolutionKind::Unique);
        assert_eq!(r.branch, Branch::FivePoint);
        let sol = &s.solutions[0];
        assert!(sol.targets[0].dist(&p(0.0, 0.0)) < 1e-12 && sol.targets[1].dist(&p(1.0, 0.0)) < 1e-12);
        let (_, rms) = align_similarity(&sol.all_points(), &c.all_points(), false).unwrap();
        assert!(rms < 1e-8);
    }

    #[test]
    fn four_targets_give_a_twin_pair() {
        let c = cfg(&[(0.0, 0.0), (1.0, 0.1), (0.7, 0.9), (-0.3, 0.6)], &[(0.2, -0.5), (1.4, 0.8), (-0.9, -0.2), (0.4, 1.5)]);
        let m = double_angle_matrix(&c).unwrap();
        let (s, r) = solve(&m, None, &SolveOptions::default()).unwrap();
        assert_eq!(s.kind, SolutionKind::TwinPair);
        assert_eq!(r.numeric_clusters, Some(2));
        for sol in &s.solutions {
            assert!(matrix_residual(sol, &m) < 1e-6);
        }
        let t = &s.solutions[0].targets;
        assert!(orientation(&t[0], &t[1], &t[2]) > 0.0);
        assert!(s.solutions.iter().any(|sol| same_solution(sol, &c)));
    }

    #[test]
    fn three_measures_give_a_twin_pair() {
        let c = cfg(&[(0.0, 0.0), (1.0, 0.0), (0.8, 0.7), (-0.2, 0.9), (0.4, -0.6)], &[(1.5, 1.2), (-1.1, 0.3), (0.3, 2.0)]);
        let m = double_angle_matrix(&c).unwrap();
        let (s, r) = solve(&m, None, &SolveOptions::default()).unwrap();
        assert_eq!(s.kind, SolutionKind::TwinPair, "{:?}", s.diagnostics);
        assert_eq!(r.branch, Branch::Duality);
        assert_eq!(r.numeric_clusters, Some(2));
        assert!(s.solutions.iter().any(|sol| same_solution(sol, &c)));
    }

    #[test]
    fn too_few_measurements_are_infinite() {
        let c = cfg(&[(0.0, 0.0), (1.0, 0.1), (0.7, 0.9), (-0.3, 0.6)], &[(0.2, -0.5), (1.4, 0.8), (-0.9, -0.2)]);
        let (s, r) = solve(&double_angle_matrix(&c).unwrap(), None, &SolveOptions::default()).unwrap();
        assert_eq!(s.kind, SolutionKind::Infinite);
        assert_eq!(r.branch, Branch::ParameterCount);
        assert!(!s.diagnostics.reasons.is_empty());
    }

    #[test]
    fn circle_and_line_is_degenerate() {
        let on = |t: f64| (t.cos(), t.sin());
        let c = cfg(&[on(2.2), on(1.6), on(0.9), on(0.2)], &[on(3.6), on(5.0), (-1.5, -1.4), (0.6, -2.3)]);
        let (s, _) = solve(&double_angle_matrix(&c).unwrap(), None, &SolveOptions::default()).unwrap();
        assert_eq!(s.kind, SolutionKind::DegenerateAmbiguous);
        assert!(!s.diagnostics.reasons.is_empty());
    }

    #[test]
    fn directed_data_keeps_the_true_solution() {
        let c = cfg(&[(0.0, 0.0), (1.0, 0.1), (0.7, 0.9), (-0.3, 0.6)], &[(0.2, -0.5), (1.4, 0.8), (-0.9, -0.2), (0.4, 1.5)]);
        let m = double_angle_matrix(&c).unwrap();
        let canon = canonicalize(&c).unwrap();
        let d = directed_angle_matrix(&canon).unwrap();
        let (s, _) = solve(&m, Some(&d), &SolveOptions::default()).unwrap();
        let outcome = s.diagnostics.direction_filter.unwrap();
        assert_eq!(outcome.candidates, 2);
        assert!(s.solutions.iter().any(|sol| same_solution(sol, &c)));
    }
}
