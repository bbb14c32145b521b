use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A symbol, index or parameter lies outside its admissible range.
    #[error("range error: {0}")]
    Range(String),

    /// The input describes an empty or otherwise degenerate object.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-side precondition was violated.
    #[error("contract error: {0}")]
    Contract(String),

    #[error("transition matrix is reducible; irreducible components: {components:?}")]
    Reducible { components: Vec<Vec<usize>> },

    #[error("unsupported hypothesis: {0}")]
    Unsupported(String),

    #[error("solver did not converge after {iterations} iterations (best value {best_value}, gradient norm {gradient_norm:e})")]
    NonConvergence {
        iterations: usize,
        best_value: f64,
        gradient_norm: f64,
    },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
