use alloc::boxed::Box;
use alloc::string::String;

use crate::classical::{EquimarginalWitness, Witness};
use crate::quantum::QuantumVerdict;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("family is not equimarginal: {0}")]
    NotEquimarginal(EquimarginalWitness),

    #[error("marginals are incompatible: {0}")]
    Incompatible(Witness),

    #[error("reduced states are not equimarginal (max deviation {0:e})")]
    QuantumNotEquimarginal(f64),

    /// The probe only runs on families that pass the Bell-Wigner check.
    #[error("Bell-Wigner check fails (Δ spectrum [{}, {}])", .0.min_eig, .0.max_eig)]
    HypothesisRefused(Box<QuantumVerdict>),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
