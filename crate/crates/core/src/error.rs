use thiserror::Error;

use crate::models::ModelKind;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector could not be accepted as a direction on the unit sphere.
    #[error("vector ({x}, {y}, {z}) has norm {norm}, outside the renormalization window around 1")]
    NotUnit { x: f64, y: f64, z: f64, norm: f64 },

    /// A hidden variable was handed to a distribution that does not contain it.
    #[error("hidden variable {lambda:?} lies outside the support of {distribution}")]
    SupportViolation {
        lambda: [f64; 3],
        distribution: String,
    },

    /// An angle or other scalar argument fell outside its domain.
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// The requested operation has no meaning for this engine.
    #[error("operation `{operation}` is not defined for model {model}")]
    UnsupportedModel {
        model: ModelKind,
        operation: &'static str,
    },

    /// A precondition on the caller's inputs was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
