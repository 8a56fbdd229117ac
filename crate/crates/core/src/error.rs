use thiserror::Error;

/// Failures raised by the reconstruction pipeline and its geometric primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points are collinear within tolerance; no circumcenter exists")]
    CollinearInput,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("all source points coincide")]
    DegenerateSource,
    #[error("all target points coincide")]
    DegenerateTarget,
    #[error("viewpoint coincides with an observed point")]
    CoincidentPoints,
    #[error("point {index} is a base point of the measurement map")]
    BasePoint { index: usize },
    #[error("entry ({row}, {col}) is not of unit modulus (|z| = {modulus})")]
    NonUnitEntry { row: usize, col: usize, modulus: f64 },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("profile is not unique (solution space dimension {dimension})")]
    NonUniqueProfile { dimension: usize },
    #[error("subset {0:?} does not contain the reference target as its first entry")]
    MissingReference(Vec<usize>),
    #[error("diagonal line is tangent to the profile at the all-ones point")]
    TangentLine,
    #[error("diagonal measurement is not of unit modulus (deviation {deviation:e})")]
    NonUnitChart { deviation: f64 },
    #[error("resection circles meet only at the reference target")]
    TangentCircles,
    #[error("measure point lies on the critical circle through the three targets")]
    OnCriticalCircle,
    #[error("sight lines are parallel")]
    ParallelLines,
    #[error("no usable target subset: {0}")]
    DegenerateSubset(String),
    #[error("reconstructed angles disagree with the input (residual {residual:e})")]
    InconsistentAngles { residual: f64 },
    #[error("three of the four vertices are collinear")]
    CollinearTriple,
    #[error("numeric search found no solution ({restarts} restarts, best residual {best_residual:e})")]
    NoSolutionFound { restarts: usize, best_residual: f64 },
    #[error("validation failed (residual {residual:e})")]
    ValidationFailed { residual: f64 },
    #[error("quadrilateral is cocircular")]
    Cocircular,
    #[error("point lies on a fundamental circle")]
    OnExceptionalCurve,
    #[error("directed-angle quotient {re:+.3e}{im:+.3e}i is not a sign")]
    QuotientNotSign { re: f64, im: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
