use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("domain error in `{field}`: {msg}")]
    Domain { field: String, msg: String },

    /// `∫ J(ω) ω^k dω` does not converge.
    #[error("divergent moment: s + k + 1 = {0} <= 0")]
    DivergentMoment(f64),

    /// The kernel/spectral-density combination is not integrable.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// Adaptive refinement was exhausted before the tolerance was met.
    #[error("integration did not converge: estimate {estimate:e}, error {abs_error:e} (limit {limit})")]
    Integration {
        estimate: f64,
        abs_error: f64,
        limit: usize,
    },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Domain {
            field: field.into(),
            msg: msg.into(),
        }
    }

    /// Dotted field path for configuration and domain errors.
    pub fn field_path(&self) -> Option<&str> {
        match self {
            Error::Domain { field, .. } => Some(field),
            Error::Config { path, .. } => Some(path),
            _ => None,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::DivergentMoment(_) => "divergent_moment",
            Error::Divergent(_) => "divergent",
            Error::Integration { .. } => "integration",
            Error::Fit(_) => "fit",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }

    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
