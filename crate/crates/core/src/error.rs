use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `node` is `None` for the atom at zero.
    #[error("integrand returned {value} at quadrature node {node:?} (lambda = {lambda})")]
    Evaluation {
        node: Option<usize>,
        lambda: f64,
        value: f64,
    },

    #[error("eigen-decomposition failed for matrix seed {seed}: {reason}")]
    Numeric { seed: u64, reason: String },

    /// Two independent evaluation routes disagree.
    #[error("consistency check failed: {what} (residuals {residuals:?}, tolerance {tolerance:e})")]
    Consistency {
        what: String,
        residuals: Vec<f64>,
        tolerance: f64,
    },

    #[error("compute budget exceeded: {work:e} operations requested, budget {budget:e}; {advice}")]
    Budget { work: f64, budget: f64, advice: String },

    /// The importance-sampling weights degenerated.
    #[error("tilted estimator unreliable at x = {x}: effective sample size {ess:.2} (gamma = {gamma})")]
    Reliability { x: f64, ess: f64, gamma: f64 },

    #[error("adaptive grid exhausted its budget of {max_nodes} nodes")]
    GridBudget { max_nodes: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
