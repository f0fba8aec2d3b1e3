//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid scenario or algorithm configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Two inputs that must agree in size do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Malformed input file.
    #[error("format error in {path}: {message}")]
    Format { path: String, message: String },

    /// The load fixed point did not converge within the sweep cap.
    /// Carries the last iterate so callers can inspect it.
    #[error("load iteration did not converge after {sweeps} sweeps (max residual {residual:.3e})")]
    NonConvergence {
        sweeps: usize,
        residual: f64,
        last: Vec<f64>,
    },

    /// A volume target cannot be reached for this topology.
    #[error("volume target unreachable: {reason} (binding cell {cell})")]
    VolumeUnreachable { cell: usize, reason: String },

    /// No topology satisfies the coverage constraint.
    #[error("infeasible scenario: {0}")]
    Infeasible(String),

    /// An operation received an empty input set.
    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn format(path: impl AsRef<std::path::Path>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.as_ref().display().to_string(),
            message: message.into(),
        }
    }
}
