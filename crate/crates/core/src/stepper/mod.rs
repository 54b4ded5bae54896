//! Time integration for quasilinear problems `u̇ + A(u)u = F(u)`.
//!
//! Two engines share one problem interface: the Picard construction on a
//! weighted (graded) time grid, continued window by window, and plain
//! semi-implicit marching for long runs.

mod grid;
mod norms;
mod picard;
mod semi_implicit;
mod shift;

pub use grid::{compute_mu0, default_grading, e0_norm, e1_norm, sigma_factor, weighted_h1_norm, weighted_norm, Mu0Kind, WeightedGrid};
pub use norms::{Basis, NormSuite, Space};
pub use picard::{
    continue_solution, dependence_ratio, picard_window, picard_window_about, ContinuationPolicy, ContinuationResult,
    ContractionDiagnostics, Outcome, PicardOptions, Solution,
};
pub use semi_implicit::{march, semi_implicit_step};
pub use shift::{spectral_shift, Shifted, ShiftedFrozen};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StepError {
    #[error("trajectory has {got} states but the grid has {expected} nodes")]
    GridMismatch { expected: usize, got: usize },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("no contraction after {halvings} window halvings (last window {window:.3e}, kappa {kappa:.3})")]
    NoContraction { window: f64, kappa: f64, halvings: usize },
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("non-positive diffusion coefficient {value:.3e} at node {index}")]
    NonPositiveCoefficient { value: f64, index: usize },
    #[error("backend failure: {0}")]
    Backend(String),
}

/// `A(v)` frozen at one state.
pub trait FrozenOperator {
    fn apply(&self, u: &[f64]) -> Vec<f64>;

    /// Solve `(I + dt A) u = rhs`.
    fn implicit_solve(&self, dt: f64, rhs: &[f64]) -> Result<Vec<f64>, StepError>;
}

pub trait QuasilinearProblem {
    type Frozen: FrozenOperator;

    fn dim(&self) -> usize;

    fn norms(&self) -> &NormSuite;

    fn freeze(&self, v: &[f64]) -> Result<Self::Frozen, StepError>;

    fn forcing(&self, v: &[f64]) -> Result<Vec<f64>, StepError>;

    /// `A(v)` and `F(v)` together; backends that share work between the two
    /// override this.
    fn split(&self, v: &[f64]) -> Result<(Self::Frozen, Vec<f64>), StepError> {
        Ok((self.freeze(v)?, self.forcing(v)?))
    }

    fn apply_a(&self, v: &[f64], u: &[f64]) -> Result<Vec<f64>, StepError> {
        Ok(self.freeze(v)?.apply(u))
    }

    fn check_admissible(&self, _v: &[f64]) -> Result<(), StepError> {
        Ok(())
    }
}

pub(crate) fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}
