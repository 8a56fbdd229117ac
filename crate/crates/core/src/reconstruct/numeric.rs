use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use itertools::Itertools;
use rayon::prelude::*;

use crate::geometry::{align_similarity, Complex64, PlanarPoint};
use crate::measurement::{Configuration, DoubleAngleMatrix};

use super::resection::resect;
use super::twin::matrix_residual;

/// Largest entry residual accepted as a converged solution.
pub const CONVERGED: f64 = 1e-10;

/// Alignment distance below which two solutions are the same.
pub const CLUSTER_DIST: f64 = 1e-4;

const MAX_ITER: usize = 500;

/// Starting points drawn per restart; the one with the smallest residual is refined.
const CANDIDATES: usize = 4;

/// Coordinates beyond this bound are treated as divergence.
const BOUND: f64 = 1e6;

/// A converged numeric solution and its final residual.
#[derive(Debug, Clone)]
pub struct NumericSolution {
    pub config: Configuration,
    pub residual: f64,
}

/// Unknowns: the targets other than the pinned pair, then `q_1..q_m`, as
/// complex numbers. The pinned pair sits at `0` and `1`.
struct Problem<'a> {
    m: &'a DoubleAngleMatrix,
    t: usize,
    /// Unknown slot of each target, `None` for the pinned pair.
    slot: Vec<Option<usize>>,
    pinned: [usize; 2],
}

impl<'a> Problem<'a> {
    fn new(m: &'a DoubleAngleMatrix, pinned: [usize; 2]) -> Self {
        let t = m.t();
        let mut next = 0;
        let slot = (0..t)
            .map(|i| {
                (!pinned.contains(&i)).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Self { m, t, slot, pinned }
    }

    fn points(&self, x: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let targets = (0..self.t)
            .map(|i| match self.slot[i] {
                Some(k) => x[k],
                None if i == self.pinned[0] => Complex64::new(0.0, 0.0),
                None => Complex64::new(1.0, 0.0),
            })
            .collect();
        (targets, x[self.t - 2..].to_vec())
    }

    /// Inverse of [`Problem::points`] after moving the pinned pair to `0, 1`.
    fn unknowns(&self, targets: &[Complex64], measures: &[Complex64]) -> Vec<Complex64> {
        let (o, u) = (targets[self.pinned[0]], targets[self.pinned[1]] - targets[self.pinned[0]]);
        let mut x: Vec<Complex64> =
            (0..self.t).filter(|i| self.slot[*i].is_some()).map(|i| (targets[i] - o) / u).collect();
        x.extend(measures.iter().map(|z| (z - o) / u));
        x
    }

    /// Residual vector (re, im interleaved) and optionally its Jacobian.
    fn eval(&self, x: &[Complex64], jac: bool) -> Option<(DVector<f64>, Option<DMatrix<f64>>)> {
        let (p, q) = self.points(x);
        let cols = self.t - 1;
        let n_res = 2 * self.m.m() * cols;
        let mut r = DVector::zeros(n_res);
        let mut j = jac.then(|| DMatrix::zeros(n_res, 2 * x.len()));
        for (row, qj) in q.iter().enumerate() {
            let a = qj - p[0];
            if a.norm() < 1e-14 {
                return None;
            }
            for col in 0..cols {
                let b = qj - p[col + 1];
                if b.norm() < 1e-14 {
                    return None;
                }
                let d = (a.conj() * b) / (a * b.conj());
                let target = self.m.entry(row, col).value();
                let k = 2 * (row * cols + col);
                r[k] = d.re - target.re;
                r[k + 1] = d.im - target.im;
                if let Some(j) = j.as_mut() {
                    // δd = 2i·d·(Im(δb/b) − Im(δa/a)), with δa = δq − δp_1 and δb = δq − δp.
                    let (ia, ib) = (a.inv(), b.inv());
                    let two_i_d = Complex64::new(0.0, 2.0) * d;
                    let mut put = |c: usize, dx: Complex64, dy: Complex64| {
                        j[(k, c)] = dx.re;
                        j[(k + 1, c)] = dx.im;
                        j[(k, c + 1)] = dy.re;
                        j[(k + 1, c + 1)] = dy.im;
                    };
                    put(2 * (self.t - 2 + row), two_i_d * (ib.im - ia.im), two_i_d * (ib.re - ia.re));
                    if let Some(s) = self.slot[0] {
                        put(2 * s, two_i_d * ia.im, two_i_d * ia.re);
                    }
                    if let Some(s) = self.slot[col + 1] {
                        put(2 * s, two_i_d * (-ib.im), two_i_d * (-ib.re));
                    }
                }
            }
        }
        Some((r, j))
    }

    fn max_abs_residual(&self, x: &[Complex64]) -> f64 {
        self.eval(x, false)
            .map(|(r, _)| {
                (0..r.len() / 2).map(|k| r[2 * k].hypot(r[2 * k + 1])).fold(0.0, f64::max)
            })
            .unwrap_or(f64::INFINITY)
    }

    /// Levenberg–Marquardt from `x`; returns the final point and its residual.
    fn minimize(&self, mut x: Vec<Complex64>) -> (Vec<Complex64>, f64) {
        let Some((mut r, _)) = self.eval(&x, false) else {
            return (x, f64::INFINITY);
        };
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        for _ in 0..MAX_ITER {
            if self.max_abs_residual(&x) < CONVERGED {
                break;
            }
            let (_, Some(j)) = self.eval(&x, true).expect("evaluated at current point") else {
                unreachable!()
            };
            let jt = j.transpose();
            let jtj = &jt * &j;
            let g = &jt * &r;
            let mut improved = false;
            while lambda < 1e12 {
                let mut a = jtj.clone();
                for i in 0..a.nrows() {
                    a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
                }
                let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial: Vec<Complex64> =
                    x.iter().enumerate().map(|(i, z)| z + Complex64::new(step[2 * i], step[2 * i + 1])).collect();
                if trial.iter().any(|z| !(z.norm() < BOUND)) {
                    lambda *= 10.0;
                    continue;
                }
                match self.eval(&trial, false) {
                    Some((rt, _)) if rt.norm_squared() < cost => {
                        x = trial;
                        r = rt;
                        cost = r.norm_squared();
                        lambda = (lambda / 10.0).max(1e-15);
                        improved = true;
                        break;
                    }
                    _ => lambda *= 10.0,
                }
            }
            if !improved {
                break;
            }
        }
        let res = self.max_abs_residual(&x);
        (x, res)
    }
}

/// A point at log-uniform distance in `[0.01, 100]` from the origin.
fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = 0.01 * 1e4f64.powf(rng.random::<f64>());
    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Unknowns determined by the pinned pair at `0, 1` and target `c` at `pc`:
/// every measure point is resected against these three and every other target
/// is the least-squares intersection of its sight lines.
fn project(problem: &Problem<'_>, c: usize, pc: Complex64) -> Option<Vec<Complex64>> {
    let (m, t) = (problem.m, problem.t);
    let [a, b] = problem.pinned;
    let (pa, pb, pc) = (PlanarPoint::new(0.0, 0.0), PlanarPoint::new(1.0, 0.0), PlanarPoint::from_complex(pc));
    let q: Vec<Complex64> = (0..m.m())
        .map(|row| resect(&pa, &pb, &pc, m.between(row, a, b), m.between(row, a, c)).ok().map(|p| p.z()))
        .collect::<Option<_>>()?;
    let mut targets = vec![Complex64::new(0.0, 0.0); t];
    targets[b] = Complex64::new(1.0, 0.0);
    targets[c] = pc.z();
    for k in (0..t).filter(|k| ![a, b, c].contains(k)) {
        // Minimise Σ |cross(e_j, p − q_j)|² over p.
        let (mut n, mut rhs) = (nalgebra::Matrix2::<f64>::zeros(), nalgebra::Vector2::<f64>::zeros());
        for (row, qj) in q.iter().enumerate() {
            let ray = -qj;
            if ray.norm() == 0.0 {
                return None;
            }
            let ray = ray / ray.norm();
            let e = (m.between(row, a, k).value() * ray * ray).sqrt();
            let normal = nalgebra::Vector2::new(-e.im, e.re);
            let proj = normal * normal.transpose();
            n += proj;
            rhs += proj * nalgebra::Vector2::new(qj.re, qj.im);
        }
        let p = n.try_inverse()? * rhs;
        targets[k] = Complex64::new(p[0], p[1]);
    }
    let x = problem.unknowns(&targets, &q);
    x.iter().all(|z| z.norm() < BOUND).then_some(x)
}

/// Steps of the two-parameter search over the position of one target.
const REDUCED_ITER: usize = 60;

/// A start from a random position of one free target, refined by damped
/// least squares over that position alone with everything else projected.
fn initial_guess(problem: &Problem<'_>, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let free: Vec<usize> = (0..problem.t).filter(|i| problem.slot[*i].is_some()).collect();
    let c = free[rng.random_range(0..free.len())];
    let cost = |z: Complex64| {
        project(problem, c, z)
            .and_then(|x| problem.eval(&x, false))
            .map(|(r, _)| r)
    };
    let mut z = random_point(rng);
    let mut r = loop {
        if let Some(r) = cost(z) {
            break r;
        }
        z = random_point(rng);
    };
    let mut lambda = 1e-3;
    for _ in 0..REDUCED_ITER {
        let h = 1e-7 * z.norm().max(1.0);
        let (Some(rx), Some(ry)) = (cost(z + Complex64::new(h, 0.0)), cost(z + Complex64::new(0.0, h))) else {
            break;
        };
        let j = DMatrix::from_columns(&[(rx - &r) / h, (ry - &r) / h]);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for i in 0..2 {
                a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let Some(step) = a.try_inverse().map(|inv| inv * -&g) else {
                lambda *= 10.0;
                continue;
            };
            let trial = z + Complex64::new(step[0], step[1]);
            match cost(trial) {
                Some(rt) if rt.norm_squared() < r.norm_squared() => {
                    z = trial;
                    r = rt;
                    lambda = (lambda / 10.0).max(1e-15);
                    improved = true;
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if !improved {
            break;
        }
    }
    project(problem, c, z).expect("evaluated above")
}

/// The configuration of `x`, moved to the frame `p_1 = 0`, `p_2 = 1`.
fn to_config(p: &Problem<'_>, x: &[Complex64]) -> Option<Configuration> {
    let (targets, measures) = p.points(x);
    let (o, u) = (targets[0], targets[1] - targets[0]);
    if u.norm() < 1e-12 {
        return None;
    }
    let map = |z: &Complex64| PlanarPoint::from_complex((z - o) / u);
    Configuration::new(targets.iter().map(map).collect(), measures.iter().map(map).collect()).ok()
}

/// One seeded restart; `None` unless it converged to a valid configuration.
/// Restarts cycle through the target pairs pinned at `0, 1` during the
/// minimisation; results are moved back to the frame `p_1 = 0`, `p_2 = 1`.
pub(crate) fn single_run(m: &DoubleAngleMatrix, seed: u64, index: usize) -> (Option<NumericSolution>, f64) {
    let pairs: Vec<[usize; 2]> = (0..m.t()).tuple_combinations().map(|(a, b)| [a, b]).collect();
    let problem = Problem::new(m, pairs[index % pairs.len()]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let start = (0..CANDIDATES)
        .map(|_| initial_guess(&problem, &mut rng))
        .map(|x| (problem.eval(&x, false).map_or(f64::INFINITY, |(r, _)| r.norm_squared()), x))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, x)| x)
        .expect("at least one candidate");
    let (x, res) = problem.minimize(start);
    if !(res < CONVERGED) {
        return (None, res);
    }
    let sol = to_config(&problem, &x).filter(|c| separated(c) && matrix_residual(c, m) < 1e-8);
    (sol.map(|config| NumericSolution { config, residual: res }), res)
}

fn separated(c: &Configuration) -> bool {
    let pts = c.all_points();
    pts.iter().enumerate().all(|(i, a)| pts[i + 1..].iter().all(|b| a.dist(b) > 1e-6))
}

pub(crate) fn same_solution(a: &Configuration, b: &Configuration) -> bool {
    align_similarity(&a.all_points(), &b.all_points(), false).is_ok_and(|(_, rms)| rms < CLUSTER_DIST)
}

fn lex_key(c: &Configuration) -> Vec<f64> {
    c.all_points().iter().flat_map(|p| [p.x, p.y]).collect()
}

/// Converged restarts grouped by similarity, with statistics.
#[derive(Debug, Clone)]
pub struct Enumeration {
    /// One representative per cluster (the lowest-residual member), ordered
    /// lexicographically by coordinates.
    pub solutions: Vec<NumericSolution>,
    pub converged: usize,
    pub best_residual: f64,
}

/// Every restart with its statistics; see [`enumerate_numeric`].
pub fn enumerate(m: &DoubleAngleMatrix, restarts: usize, seed: u64) -> Enumeration {
    let runs: Vec<(Option<NumericSolution>, f64)> =
        (0..restarts).into_par_iter().map(|i| single_run(m, seed, i)).collect();
    let best_residual = runs.iter().map(|(_, r)| *r).fold(f64::INFINITY, f64::min);
    let mut clusters: Vec<NumericSolution> = Vec::new();
    let mut converged = 0;
    for sol in runs.into_iter().filter_map(|(s, _)| s) {
        converged += 1;
        match clusters.iter_mut().find(|c| same_solution(&c.config, &sol.config)) {
            Some(c) if sol.residual < c.residual => *c = sol,
            Some(_) => {}
            None => clusters.push(sol),
        }
    }
    clusters.sort_by(|a, b| {
        lex_key(&a.config)
            .iter()
            .zip(lex_key(&b.config).iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Enumeration { solutions: clusters, converged, best_residual }
}

/// Distinct configurations (up to similarity, in the frame `p_1 = 0`,
/// `p_2 = 1`) reproducing `m`, found by damped least squares from `restarts`
/// seeded random starts. Deterministic for a fixed seed.
pub fn enumerate_numeric(m: &DoubleAngleMatrix, restarts: usize, seed: u64) -> Vec<Configuration> {
    if (m.m() as i64 - 2) * (m.t() as i64 - 3) < 2 {
        return Vec::new();
    }
    enumerate(m, restarts, seed).solutions.into_iter().map(|s| s.config).collect()
}
