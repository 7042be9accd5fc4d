use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("z = {z} lies outside the profile domain [{min}, {max}]")]
    OutOfDomain { z: f64, min: f64, max: f64 },

    #[error("invalid field samples: {0}")]
    InvalidSamples(String),

    #[error("Ermakov envelope collapsed at z = {z} (b = {b:e})")]
    EnvelopeCollapse { z: f64, b: f64 },

    #[error("integrator step size underflow at z = {z} (h = {h:e})")]
    StepSizeUnderflow { z: f64, h: f64 },

    #[error("truncated Fock space of dimension {dim} is too small, need at least {required}")]
    TruncationRisk { dim: usize, required: usize },

    #[error("non-emitting channel: transverse energy bracket {bracket} is not positive")]
    DarkChannel { bracket: f64 },

    #[error("z quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureTolerance { achieved: f64, requested: f64 },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EnvelopeCollapse { .. }
                | Error::StepSizeUnderflow { .. }
                | Error::TruncationRisk { .. }
                | Error::DarkChannel { .. }
                | Error::QuadratureTolerance { .. }
        )
    }
}
