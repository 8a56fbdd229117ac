//! Versioned JSON file formats.
//!
//! Every file carries a `kind` tag and a `version`. Points are `[x, y]`
//! pairs; angles are unit complex numbers written as `[re, im]` pairs.

use planar_geodesy::ambiguity::DegeneracyFlag;
use planar_geodesy::reconstruct::{Branch, DirectionFilterOutcome, ReconstructionReport, StageResidual};
use planar_geodesy::{Complex64, Configuration, DirectedAngleMatrix, DoubleAngleMatrix, PlanarPoint, SolutionKind, SolutionSet};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const VERSION: u32 = 1;

pub type Point = [f64; 2];
pub type Angle = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    Scenario,
    Matrices,
    SolutionReport,
    Census,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub kind: FileKind,
    pub version: u32,
    pub t: usize,
    pub m: usize,
    pub targets: Vec<Point>,
    pub measures: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    /// Half-width of the uniform angular jitter in radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatricesFile {
    pub kind: FileKind,
    pub version: u32,
    pub t: usize,
    pub m: usize,
    /// `double[j][i] = ∠_{q_{j+1}}(p_1, p_{i+2})²`.
    pub double: Vec<Vec<Angle>>,
    /// Same layout, directed angles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directed: Option<Vec<Vec<Angle>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionEntry {
    pub targets: Vec<Point>,
    pub measures: Vec<Point>,
    /// Largest entrywise distance between this solution's matrix and the input.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReportFile {
    pub kind: FileKind,
    pub version: u32,
    pub t: usize,
    pub m: usize,
    pub solution_kind: SolutionKind,
    pub branch: Branch,
    /// In the frame `p_1 = (0, 0)`, `p_2 = (1, 0)`.
    pub solutions: Vec<SolutionEntry>,
    pub flags: Vec<DegeneracyFlag>,
    pub reasons: Vec<String>,
    pub direction_filter: Option<DirectionFilterOutcome>,
    pub stages: Vec<StageResidual>,
    pub numeric_clusters: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

fn point(p: &PlanarPoint) -> Point {
    [p.x, p.y]
}

fn angle(z: Complex64) -> Angle {
    [z.re, z.im]
}

fn points(ps: &[Point]) -> Result<Vec<PlanarPoint>, CliError> {
    ps.iter()
        .map(|&[x, y]| {
            if x.is_finite() && y.is_finite() {
                Ok(PlanarPoint::new(x, y))
            } else {
                Err(CliError::Invalid("non-finite coordinate".into()))
            }
        })
        .collect()
}

fn check_header(kind: FileKind, version: u32, expected: FileKind) -> Result<(), CliError> {
    if kind != expected {
        return Err(CliError::Invalid(format!("expected a {expected:?} file, got {kind:?}")));
    }
    if version != VERSION {
        return Err(CliError::Invalid(format!("unsupported version {version}, expected {VERSION}")));
    }
    Ok(())
}

impl ScenarioFile {
    pub fn new(cfg: &Configuration, seed: Option<u64>, generator: Option<&str>) -> Self {
        Self {
            kind: FileKind::Scenario,
            version: VERSION,
            t: cfg.t(),
            m: cfg.m(),
            targets: cfg.targets.iter().map(point).collect(),
            measures: cfg.measures.iter().map(point).collect(),
            seed,
            generator: generator.map(str::to_string),
            jitter: None,
        }
    }

    pub fn configuration(&self) -> Result<Configuration, CliError> {
        check_header(self.kind, self.version, FileKind::Scenario)?;
        if self.targets.len() != self.t || self.measures.len() != self.m {
            return Err(CliError::Invalid(format!(
                "declared shape ({}, {}) does not match {} targets and {} measure points",
                self.t,
                self.m,
                self.targets.len(),
                self.measures.len()
            )));
        }
        Ok(Configuration::new(points(&self.targets)?, points(&self.measures)?)?)
    }
}

fn rows(values: &[Vec<Complex64>]) -> Vec<Vec<Angle>> {
    values.iter().map(|r| r.iter().copied().map(angle).collect()).collect()
}

fn complex_rows(rows: &[Vec<Angle>]) -> Vec<Vec<Complex64>> {
    rows.iter().map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect()).collect()
}

impl MatricesFile {
    pub fn new(double: &DoubleAngleMatrix, directed: Option<&DirectedAngleMatrix>) -> Self {
        Self {
            kind: FileKind::Matrices,
            version: VERSION,
            t: double.t(),
            m: double.m(),
            double: rows(&double.rows_complex()),
            directed: directed.map(|d| rows(&d.rows_complex())),
            jitter: None,
            seed: None,
        }
    }

    fn check_shape(&self, rows: &[Vec<Angle>]) -> Result<(), CliError> {
        if rows.len() != self.m || rows.iter().any(|r| r.len() + 1 != self.t) {
            return Err(CliError::Invalid(format!("matrix shape does not match t = {}, m = {}", self.t, self.m)));
        }
        Ok(())
    }

    pub fn double_matrix(&self) -> Result<DoubleAngleMatrix, CliError> {
        check_header(self.kind, self.version, FileKind::Matrices)?;
        self.check_shape(&self.double)?;
        Ok(DoubleAngleMatrix::from_rows(&complex_rows(&self.double))?)
    }

    pub fn directed_matrix(&self) -> Result<Option<DirectedAngleMatrix>, CliError> {
        check_header(self.kind, self.version, FileKind::Matrices)?;
        match &self.directed {
            None => Ok(None),
            Some(d) => {
                self.check_shape(d)?;
                Ok(Some(DirectedAngleMatrix::from_rows(&complex_rows(d))?))
            }
        }
    }
}

impl SolutionEntry {
    pub fn configuration(&self) -> Result<Configuration, CliError> {
        Ok(Configuration::new(points(&self.targets)?, points(&self.measures)?)?)
    }
}

impl SolutionReportFile {
    pub fn new(set: &SolutionSet, report: &ReconstructionReport, restarts: usize, seed: u64) -> Self {
        let solutions = set
            .solutions
            .iter()
            .enumerate()
            .map(|(k, c)| SolutionEntry {
                targets: c.targets.iter().map(point).collect(),
                measures: c.measures.iter().map(point).collect(),
                residual: set.diagnostics.residuals.get(k).copied(),
            })
            .collect();
        Self {
            kind: FileKind::SolutionReport,
            version: VERSION,
            t: report.t,
            m: report.m,
            solution_kind: set.kind,
            branch: report.branch,
            solutions,
            flags: set.diagnostics.flags.clone(),
            reasons: set.diagnostics.reasons.clone(),
            direction_filter: set.diagnostics.direction_filter,
            stages: report.stages.clone(),
            numeric_clusters: report.numeric_clusters,
            restarts,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check_header(self.kind, self.version, FileKind::SolutionReport)
    }
}

/// The `kind` tag of an arbitrary file.
pub fn file_kind(text: &str) -> Result<FileKind, CliError> {
    #[derive(Deserialize)]
    struct Header {
        kind: FileKind,
    }
    Ok(serde_json::from_str::<Header>(text)?.kind)
}
