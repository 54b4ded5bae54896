//! Problem backends for the stepper.

mod linear;
mod ms;
mod second_order;

pub use linear::{DenseFrozen, LinearSystem};
pub use ms::{ms_equilibrium_residual, ms_vector_field, MsEvaluation, MsProblem, MsState};
pub use second_order::{make_second_order, SecondOrderProblem, TridiagonalFrozen};

use thiserror::Error;

use crate::elliptic::EllipticError;
use crate::hanzawa::HanzawaError;
use crate::stepper::StepError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Hanzawa(#[from] HanzawaError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Step(#[from] StepError),
}

impl From<ModelError> for StepError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Hanzawa(h @ HanzawaError::TubeViolation(_)) | ModelError::Hanzawa(h @ HanzawaError::SelfIntersection(..)) => {
                StepError::ConstraintViolation(h.to_string())
            }
            ModelError::Step(s) => s,
            other => StepError::Backend(other.to_string()),
        }
    }
}
