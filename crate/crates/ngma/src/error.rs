use thiserror::Error;

/// Errors raised by scenario construction, rate evaluation, and search.
#[derive(Debug, Error)]
pub enum NgmaError {
    #[error("invalid channel spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: {0}")]
    DimensionError(String),

    #[error("user index {0} out of range (K = {1})")]
    InvalidUser(usize, usize),

    #[error("users {0} and {1} are not in the same cluster")]
    NotCoClustered(usize, usize),

    #[error("cluster {0} has fewer than 2 users")]
    InvalidClusterSize(usize),

    #[error("overloaded geometry: {0}")]
    Overloaded(String),

    #[error("rank-deficient channel matrix: smallest singular value {sigma_min:.3e} below threshold {threshold:.3e}")]
    RankDeficient { sigma_min: f64, threshold: f64 },

    #[error("channel of user {0} has zero norm")]
    ZeroChannel(usize),

    #[error("search space of {0} configurations exceeds cap {1}")]
    SearchTooLarge(u64, u64),

    #[error("no SIC-feasible configuration; best infeasible value {best_value:.6} with max condition slack {max_slack:.3e}")]
    Infeasible { best_value: f64, max_slack: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, NgmaError>;
