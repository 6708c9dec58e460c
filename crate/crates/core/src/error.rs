use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of a formula (log of a nonpositive
    /// coefficient, `2F <= kappa_tot`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed-form expression hit a vanishing denominator.
    #[error("singular evaluation: {0}")]
    Singular(String),

    /// Configuration problem, tagged with the offending key path.
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("degenerate null space: {0}")]
    Degenerate(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("spectra are not on a common grid: {0}")]
    GridMismatch(String),

    /// A solver failure at a particular sweep point.
    #[error("at delta1/kappa_tot = {delta1_over_kappa_tot}: {source}")]
    AtGridPoint {
        delta1_over_kappa_tot: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Domain(_) => 1,
            Error::Io { .. } => 3,
            Error::Json(_) => 3,
            Error::AtGridPoint { source, .. } => source.exit_code().max(2),
            _ => 2,
        }
    }
}
