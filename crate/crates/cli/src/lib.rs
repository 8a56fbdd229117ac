//! Batch front end for `planar-geodesy`: scenario generation, measurement,
//! solving, census runs over shapes and SVG figures.

pub mod commands;
pub mod generate;
pub mod plot;
pub mod schema;

use thiserror::Error;

pub use commands::{census, expected_count, measure, solve, CensusFile, CensusRow, Expected};
pub use generate::{generate, Family};
pub use plot::{plot, PlotKind};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const DEGENERATE: i32 = 2;
    pub const NO_SOLUTION: i32 = 3;
    pub const INVALID_INPUT: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("nothing to plot: {0}")]
    UnplottableReport(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed file: {0}")]
    Parse(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NoSolution(_) => exit::NO_SOLUTION,
            _ => exit::INVALID_INPUT,
        }
    }
}

impl From<planar_geodesy::Error> for CliError {
    fn from(e: planar_geodesy::Error) -> Self {
        use planar_geodesy::Error as E;
        match e {
            E::NoSolutionFound { .. } | E::InconsistentAngles { .. } | E::ValidationFailed { .. } => {
                CliError::NoSolution(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}
