//! Point identification from double angle matrices.

pub mod identify;
pub mod numeric;
pub mod resection;
pub mod solve;
pub mod twin;

use serde::{Deserialize, Serialize};

use crate::ambiguity::DegeneracyFlag;
use crate::measurement::Configuration;

pub use identify::identify_targets;
pub use numeric::{enumerate_numeric, NumericSolution};
pub use resection::{forward_intersect, resect};
pub use solve::{canonicalize, identify_quadrilateral, resect_measures, solve};
pub use twin::{dual_second_solution, twin_quadrilateral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    Unique,
    TwinPair,
    Infinite,
    DegenerateAmbiguous,
}

impl std::fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolutionKind::Unique => "unique",
            SolutionKind::TwinPair => "twin-pair",
            SolutionKind::Infinite => "infinite",
            SolutionKind::DegenerateAmbiguous => "degenerate-ambiguous",
        })
    }
}

/// Pipeline branch taken by [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Fewer equations than unknowns.
    ParameterCount,
    /// `t ≥ 5`, `m ≥ 4`: targets from diagonal points, then resection.
    FivePoint,
    /// `t = 4`, `m ≥ 4`: numeric solution and its twin.
    Quadrilateral,
    /// `m = 3`, `t ≥ 5`: numeric solution and its dual.
    Duality,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::ParameterCount => "parameter-count",
            Branch::FivePoint => "five-point",
            Branch::Quadrilateral => "quadrilateral-twin",
            Branch::Duality => "duality",
        }
    }
}

/// Outcome of the optional direction filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionFilterOutcome {
    pub candidates: usize,
    pub retained: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub flags: Vec<DegeneracyFlag>,
    pub reasons: Vec<String>,
    /// Largest entrywise matrix residual of each solution.
    pub residuals: Vec<f64>,
    pub direction_filter: Option<DirectionFilterOutcome>,
}

/// All configurations compatible with a double angle matrix, in the frame
/// `p_1 = (0,0)`, `p_2 = (1,0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub kind: SolutionKind,
    pub solutions: Vec<Configuration>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResidual {
    pub stage: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub t: usize,
    pub m: usize,
    /// `(m − 2)(t − 3) − 2`: equations minus unknowns.
    pub excess: i64,
    pub branch: Branch,
    pub stages: Vec<StageResidual>,
    /// Cluster count of the numeric stage, when it ran.
    pub numeric_clusters: Option<usize>,
}

impl ReconstructionReport {
    pub(crate) fn record(&mut self, stage: &str, residual: f64) {
        self.stages.push(StageResidual { stage: stage.to_string(), residual });
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Entrywise tolerance for validating reconstructions against the input.
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { restarts: 64, seed: 0, tol: 1e-6 }
    }
}
