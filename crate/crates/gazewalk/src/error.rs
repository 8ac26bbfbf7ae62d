use thiserror::Error;

/// Errors produced by the gazewalk library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("window is degenerate: require a < b and c < d")]
    DegenerateWindow,
    #[error("point {index} lies outside the window")]
    PointOutsideWindow { index: usize },
    #[error("fixation sequence is empty")]
    EmptySequence,
    #[error("point {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("empty input point set")]
    EmptyInput,
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("index {index} out of range for sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("parameter {name} = {value} outside its valid range")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("no auxiliary sequences left for saliency estimation")]
    NoAuxiliaryData,
    #[error("density has zero mass over the window")]
    ZeroMass,
    #[error("density is zero at the evaluation point")]
    ZeroDensityAtPoint,
    #[error("model density is zero at observed transition {k}")]
    ZeroDensityAtObservation { k: usize },
    #[error("history too short for this model family (have {have}, need {need})")]
    HistoryTooShort { have: usize, need: usize },
    #[error("theta on the boundary of [0,1] while both indicator classes occur in the data")]
    ThetaOnBoundaryWithMismatch,
    #[error("all grid points yield -inf log-likelihood")]
    DegenerateLikelihood,
    #[error("rejection sampler exceeded {0} consecutive rejected proposals")]
    NonTermination(u64),
    #[error("summary statistic tags differ: {left} vs {right}")]
    TagMismatch { left: String, right: String },
    #[error("curve lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("bootstrap replicate {replicate} failed: {source}")]
    BootstrapReplicate {
        replicate: usize,
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration/validation
    /// problems, 3 for runtime/numerical failures.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            DegenerateWindow
            | PointOutsideWindow { .. }
            | EmptySequence
            | NonFiniteCoordinate { .. }
            | EmptyInput
            | NonPositiveRadius(_)
            | NonPositiveBandwidth(_)
            | IndexOutOfRange { .. }
            | ParamOutOfRange { .. }
            | NoAuxiliaryData
            | HistoryTooShort { .. }
            | TagMismatch { .. }
            | LengthMismatch { .. }
            | Config(_)
            | Csv(_)
            | Json(_) => 2,
            _ => 3,
        }
    }
}
