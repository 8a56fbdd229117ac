use std::collections::BTreeMap;

use planar_geodesy::ambiguity::{degeneracy_flags, DEGENERACY_TOL};
use planar_geodesy::{directed_angle_matrix, double_angle_matrix, Complex64, DirectedAngleMatrix, SolutionKind, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generate::{generate, Family};
use crate::schema::{FileKind, MatricesFile, ScenarioFile, SolutionReportFile, VERSION};
use crate::{exit, CliError};

/// Double and directed matrices of a scenario. A positive `jitter` (radians)
/// perturbs every directed angle by an independent uniform amount in
/// `[-jitter, jitter]`, drawn from `seed`; the double angles are the squares
/// of the perturbed directed angles.
pub fn measure(scenario: &ScenarioFile, jitter: Option<f64>, seed: u64) -> Result<MatricesFile, CliError> {
    let cfg = scenario.configuration()?;
    let jitter = jitter.or(scenario.jitter).unwrap_or(0.0);
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(CliError::Invalid(format!("jitter must be a non-negative number, got {jitter}")));
    }
    let mut directed = directed_angle_matrix(&cfg)?;
    if jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<Complex64> = directed
            .values()
            .into_iter()
            .map(|z| z * Complex64::from_polar(1.0, rng.random_range(-jitter..=jitter)))
            .collect();
        directed = DirectedAngleMatrix::from_complex(cfg.t(), cfg.m(), &values)?;
    }
    let double = if jitter > 0.0 { directed.squared() } else { double_angle_matrix(&cfg)? };
    let mut file = MatricesFile::new(&double, Some(&directed));
    if jitter > 0.0 {
        file.jitter = Some(jitter);
        file.seed = Some(seed);
    }
    Ok(file)
}

/// Runs the solver on a matrices file. The exit code is
/// [`exit::DEGENERATE`] when the result is degenerate or flagged.
pub fn solve(matrices: &MatricesFile, use_directed: bool, opts: &SolveOptions) -> Result<(SolutionReportFile, i32), CliError> {
    let double = matrices.double_matrix()?;
    let directed = if use_directed {
        Some(matrices.directed_matrix()?.ok_or_else(|| CliError::Invalid("--directed given but the file has no directed matrix".into()))?)
    } else {
        None
    };
    let (set, report) = planar_geodesy::solve(&double, directed.as_ref(), opts)?;
    let code = if set.kind == SolutionKind::DegenerateAmbiguous || !set.diagnostics.flags.is_empty() {
        exit::DEGENERATE
    } else {
        exit::SUCCESS
    };
    Ok((SolutionReportFile::new(&set, &report, opts.restarts, opts.seed), code))
}

/// Expected number of configurations for a generic instance of shape `(t, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Count(usize),
    Infinite,
}

pub fn expected_count(t: usize, m: usize) -> Expected {
    if (m as i64 - 2) * (t as i64 - 3) < 2 {
        Expected::Infinite
    } else if t == 4 || m == 3 {
        Expected::Count(2)
    } else {
        Expected::Count(1)
    }
}

impl std::fmt::Display for Expected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expected::Count(n) => write!(f, "{n}"),
            Expected::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub t: usize,
    pub m: usize,
    pub expected: Expected,
    pub instances: usize,
    /// Outcome label (`"1"`, `"2"`, `"infinite"`, `"degenerate-ambiguous"`,
    /// `"no-solution"`, `"invalid"`) to number of instances.
    pub outcomes: BTreeMap<String, usize>,
    /// Instances whose outcome equals `expected`.
    pub agreeing: usize,
    /// Instances raising at least one degeneracy flag.
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusFile {
    pub kind: FileKind,
    pub version: u32,
    pub family: Family,
    pub seed: u64,
    pub restarts: usize,
    pub rows: Vec<CensusRow>,
}

impl CensusFile {
    /// Plain-text table, one line per shape.
    pub fn table(&self) -> String {
        let mut out = String::from("  t   m  expected  agree  flagged  outcomes\n");
        for r in &self.rows {
            let outcomes = r.outcomes.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(" ");
            out.push_str(&format!(
                "{:>3} {:>3}  {:>8}  {:>2}/{:<2}  {:>7}  {}\n",
                r.t,
                r.m,
                r.expected.to_string(),
                r.agreeing,
                r.instances,
                r.flagged,
                outcomes
            ));
        }
        out
    }
}

fn outcome(family: Family, t: usize, m: usize, seed: u64, restarts: usize) -> (String, bool) {
    let Ok(cfg) = generate(family, t, m, seed) else {
        return ("invalid".into(), false);
    };
    let flagged = !degeneracy_flags(&cfg, DEGENERACY_TOL).is_empty();
    let Ok(matrix) = double_angle_matrix(&cfg) else {
        return ("invalid".into(), flagged);
    };
    let label = match planar_geodesy::solve(&matrix, None, &SolveOptions { restarts, seed, ..SolveOptions::default() }) {
        Ok((set, _)) => match set.kind {
            SolutionKind::Infinite => "infinite".to_string(),
            SolutionKind::DegenerateAmbiguous => "degenerate-ambiguous".to_string(),
            _ => set.solutions.len().to_string(),
        },
        Err(e) => match CliError::from(e) {
            CliError::NoSolution(_) => "no-solution".to_string(),
            _ => "invalid".to_string(),
        },
    };
    (label, flagged)
}

/// Solves `n` seeded instances (`seed + index`) of each shape and tabulates the
/// outcomes against the expected counts. Instances run in parallel.
pub fn census(shapes: &[(usize, usize)], n: usize, seed: u64, restarts: usize, family: Family) -> CensusFile {
    let rows = shapes
        .iter()
        .map(|&(t, m)| {
            let results: Vec<(String, bool)> =
                (0..n).into_par_iter().map(|i| outcome(family, t, m, seed.wrapping_add(i as u64), restarts)).collect();
            let expected = expected_count(t, m);
            let mut outcomes = BTreeMap::new();
            for (label, _) in &results {
                *outcomes.entry(label.clone()).or_insert(0) += 1;
            }
            CensusRow {
                t,
                m,
                expected,
                instances: n,
                agreeing: outcomes.get(&expected.to_string()).copied().unwrap_or(0),
                flagged: results.iter().filter(|(_, f)| *f).count(),
                outcomes,
            }
        })
        .collect();
    CensusFile { kind: FileKind::Census, version: VERSION, family, seed, restarts, rows }
}
