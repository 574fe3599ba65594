use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("supremum not attained inside the t-grid for s = {s}")]
    SupNotAttained { s: f64 },

    #[error("Hessian requested at zero gradient without regularization")]
    SingularPoint,

    #[error("Newton solver did not converge after {iterations} iterations (gradient sup-norm {residual:e})")]
    NewtonNotConverged { iterations: usize, residual: f64 },

    #[error("line search failed at Newton iteration {iteration} (gradient sup-norm {residual:e})")]
    LineSearch { iteration: usize, residual: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("function is not monotone: {0}")]
    NonMonotone(String),

    #[error("solve did not converge: {reason}")]
    NotConverged {
        reason: String,
        report: Box<crate::solver::SolveReport>,
    },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
