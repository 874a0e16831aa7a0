use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (bad index, dimension, sign).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown preset `{0}` (expected one of: {1})")]
    UnknownPreset(String, String),

    /// No unique dark state exists (all couplings vanish).
    #[error("no unique dark state: {0}")]
    DegenerateDarkState(String),

    /// Linear system singular to working precision.
    #[error("singular linear system (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    /// The generator has more than one stationary state.
    #[error("steady state not unique: kernel dimension estimate {kernel_dim}")]
    DegenerateKernel { kernel_dim: usize },

    #[error("steady state failed validation: {0}")]
    SteadyState(String),

    #[error("integration failed at t = {time:.6} ps: {reason} (error estimate {error_estimate:.3e})")]
    Integration {
        time: f64,
        reason: String,
        error_estimate: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
