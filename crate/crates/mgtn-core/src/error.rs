use thiserror::Error;

/// Errors produced by tensor, decomposition, graph and network operations.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("shape mismatch: expected {expected:?}, got {got:?}{}", context_suffix(context))]
    ShapeMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
        context: String,
    },

    #[error("tensor order mismatch: left has order {left}, right has order {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("data length {len} does not match shape {shape:?} (expected {expected})")]
    DataLength {
        shape: Vec<usize>,
        len: usize,
        expected: usize,
    },

    #[error("mode index {mode} out of range for order-{order} tensor (modes are 1-based)")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("mode {mode} appears more than once in contraction spec")]
    DuplicateMode { mode: usize },

    #[error("contracted modes differ in size: mode {left_mode} of left has size {left_size}, mode {right_mode} of right has size {right_size}")]
    ContractionDimMismatch {
        left_mode: usize,
        left_size: usize,
        right_mode: usize,
        right_size: usize,
    },

    #[error("invalid tensor-train ranks {ranks:?}: {reason}")]
    InvalidRanks { ranks: Vec<usize>, reason: String },

    #[error("invalid truncation tolerance {0}: must lie in (0, 1)")]
    InvalidTolerance(f64),

    #[error("tensor-train decomposition needs order >= 2, got {0}")]
    TtOrderTooSmall(usize),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("adjacency entry ({row},{col}) is negative: {value}")]
    NegativeWeight { row: usize, col: usize, value: f64 },

    #[error("time graph needs at least 2 steps, got {0}")]
    TooFewSteps(usize),

    #[error("kernel scale must be positive, got {0}")]
    NonPositiveSigma(f64),

    #[error("series for node {node} is constant; correlation is undefined")]
    ConstantSeries { node: usize },

    #[error("spot rate for pair ({row},{col}) is not positive: {value}")]
    NonPositiveSpot { row: usize, col: usize, value: f64 },

    #[error("graph for mode {mode} is {graph_nodes}x{graph_nodes} but input mode has size {mode_size}")]
    GraphModeMismatch {
        mode: usize,
        graph_nodes: usize,
        mode_size: usize,
    },

    #[error("non-finite loss at batch {batch_index}")]
    NonFiniteLoss { batch_index: usize },

    #[error("learning rate must be positive, got {0}")]
    NonPositiveLearningRate(f64),

    #[error("duplicate parameter name {0:?}")]
    DuplicateParameter(String),

    #[error("parameter contains non-finite entries: {0}")]
    NonFiniteParameter(String),

    #[error("unsupported checkpoint version {got} (this build reads version {supported})")]
    CheckpointVersion { got: u32, supported: u32 },

    #[error("malformed tensor file: {0}")]
    TensorFormat(String),

    #[error("malformed adjacency csv: {0}")]
    AdjacencyFormat(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

fn context_suffix(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
