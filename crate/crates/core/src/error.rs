use alloc::string::String;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("descriptor mismatch: {left} vs {right}")]
    DescriptorMismatch { left: String, right: String },
    #[error("singular matrix")]
    Singular,
    #[error("logarithm outside principal branch (|g - 1| = {distance})")]
    OutOfBranch { distance: f64 },
    #[error("basis re-expansion failed (residual {residual})")]
    Reexpansion { residual: f64 },
    #[error("unknown crossed module `{0}`")]
    UnknownInstance(String),
    #[error("cells are not composable (residual {residual})")]
    NonComposable { residual: f64 },
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("finite-difference stencil leaves the chart at {point:?}")]
    BoundaryProximity { point: [f64; 3] },
    #[error("not a bigon: endpoint residual {residual}")]
    NotABigon { residual: f64 },
    #[error("t_* is not invertible")]
    SingularTStar,
    #[error("{0} leaves its chart")]
    OutsideChart(String),
    #[error("itinerary gap: {0}")]
    ItineraryGap(String),
    #[error("no transition from chart {from} to chart {to}")]
    MissingTransition { from: usize, to: usize },
    #[error("no cocycle for charts ({i}, {j}, {k})")]
    MissingCocycle { i: usize, j: usize, k: usize },
    #[error("calibration found {passing} passing convention assignments, expected exactly one")]
    NoUniqueConvention { passing: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
