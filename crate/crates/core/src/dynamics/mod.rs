//! Semiflow driver and the qualitative analyses run on its trajectories.

mod analysis;
mod evolve;
mod export;
mod linearize;

pub use analysis::{
    exponential_rate, fit_equilibrium, last_decade, ljapunov_trace, omega_limit_report, EquilibriumFit, LjapunovTrace,
    OmegaLimitReport, RateFit, Verdict,
};
pub use evolve::{evolve_ms, evolve_quasilinear, maybe_reparameterize, EvolveOptions, Mode, Monitors};
pub use export::{curve_svg, linearization_text, termination_text, trajectory_csv, CSV_HEADER};
pub use linearize::{linearize_at, LinearizationReport, Stability};

use thiserror::Error;

use crate::hanzawa::HanzawaError;
use crate::models::ModelError;
use crate::stepper::StepError;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("state is not an equilibrium (residual {residual:.3e})")]
    NotAnEquilibrium { residual: f64 },
    #[error("series has non-positive or non-finite entries")]
    NonPositiveSeries,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Hanzawa(#[from] HanzawaError),
}

/// Monitor channels aligned with `Trajectory::times`. Channels that do not
/// apply to a backend hold `NaN`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Channels {
    pub perimeter: Vec<f64>,
    pub area: Vec<f64>,
    /// `|ρ̇|_∞`.
    pub residual: Vec<f64>,
    pub ball_radius: Vec<f64>,
    /// Distance to the height constraint, `0.3 a − |ρ|_∞`.
    pub eta: Vec<f64>,
    pub xgamma_norm: Vec<f64>,
    /// `∫_Ω |∇u|²` at each recorded state.
    pub dissipation: Vec<f64>,
}

impl Channels {
    fn push(&mut self, row: [f64; 7]) {
        self.perimeter.push(row[0]);
        self.area.push(row[1]);
        self.residual.push(row[2]);
        self.ball_radius.push(row[3]);
        self.eta.push(row[4]);
        self.xgamma_norm.push(row[5]);
        self.dissipation.push(row[6]);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    /// The reference circle was replaced. `mismatch` is the largest change in
    /// perimeter, area, ball radius and `|V|_∞` between the two descriptions.
    Reparameterized { center: (f64, f64), radius: f64, mismatch: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BreakdownCause {
    TubeViolation(String),
    BallConditionBreach { radius: f64 },
    NormBlowup { norm: f64 },
    ConstraintMargin { eta: f64 },
    NoContraction(String),
}

impl std::fmt::Display for BreakdownCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BreakdownCause::TubeViolation(m) => write!(f, "tube violation: {m}"),
            BreakdownCause::BallConditionBreach { radius } => write!(f, "ball condition breach (r = {radius:.3e})"),
            BreakdownCause::NormBlowup { norm } => write!(f, "norm blow-up ({norm:.3e})"),
            BreakdownCause::ConstraintMargin { eta } => write!(f, "constraint margin exhausted (eta = {eta:.3e})"),
            BreakdownCause::NoContraction(m) => write!(f, "no contraction: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    HorizonReached,
    /// Stopped early because the equilibrium residual fell below the target.
    ResidualReached,
    Breakdown { time: f64, cause: BreakdownCause },
}

#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub channels: Channels,
    pub events: Vec<Event>,
    pub termination: Termination,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn reached_end(&self) -> bool {
        !matches!(self.termination, Termination::Breakdown { .. })
    }
}
