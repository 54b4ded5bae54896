use super::{fit_equilibrium, BreakdownCause, Channels, DynamicsError, Event, EventKind, Termination, Trajectory};
use crate::elliptic::{dirichlet_energy, EllipticError};
use crate::geometry::{tube_and_ball, Circle, CurveSpec, ReferenceCurve};
use crate::hanzawa::{reparameterize, HanzawaError, SLOPE_BOUND, VALIDITY_MARGIN};
use crate::models::{ModelError, MsEvaluation, MsProblem, MsState};
use crate::stepper::{
    continue_solution, default_grading, picard_window, ContinuationPolicy, FrozenOperator, Outcome, PicardOptions,
    QuasilinearProblem, Space, StepError, WeightedGrid,
};

/// Breakdown thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monitors {
    /// Bound `M` on the `X_γ` norm of the heights.
    pub norm_bound: f64,
    /// Smallest admissible ball radius `r`.
    pub ball_radius: f64,
    /// Smallest admissible margin `η`, as a fraction of the tube width `a`.
    pub eta_fraction: f64,
}

impl Default for Monitors {
    fn default() -> Self {
        Self { norm_bound: 1e3, ball_radius: 0.05, eta_fraction: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    SemiImplicit { dt: f64 },
    /// Picard windows of length `window` with `steps` nodes each.
    Picard { window: f64, steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub mode: Mode,
    pub horizon: f64,
    pub monitors: Monitors,
    pub p: f64,
    pub mu: f64,
    /// Stop once `|V|_∞` falls below this value.
    pub stop_residual: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            mode: Mode::SemiImplicit { dt: 1e-4 },
            horizon: 0.2,
            monitors: Monitors::default(),
            p: 6.0,
            mu: 0.7,
            stop_residual: None,
        }
    }
}

fn reparameterize_above(state: &MsState, limit: f64) -> Result<Option<MsState>, DynamicsError> {
    let h = state.height();
    if h.sup_norm() <= limit && h.slope() <= SLOPE_BOUND {
        return Ok(None);
    }
    let gamma = state.interface()?;
    let fit = fit_equilibrium(&gamma);
    let base = ReferenceCurve::build(
        &CurveSpec::Circle(Circle::new(fit.center, fit.radius)),
        state.base().len(),
        state.container(),
    )
    .map_err(HanzawaError::from)?;
    let height = reparameterize(&gamma, &base, state.container())?;
    height.validate()?;
    Ok(Some(MsState::new(height, state.container())?))
}

/// Re-center the reference circle once the heights leave the validity margin
/// or get too steep; the realized interface is unchanged.
pub fn maybe_reparameterize(state: &MsState) -> Result<MsState, DynamicsError> {
    let limit = VALIDITY_MARGIN * state.height().tube().a;
    Ok(reparameterize_above(state, limit)?.unwrap_or_else(|| state.clone()))
}

fn breakdown_cause(e: &ModelError) -> Option<BreakdownCause> {
    match e {
        ModelError::Hanzawa(h) => Some(BreakdownCause::TubeViolation(h.to_string())),
        ModelError::Elliptic(EllipticError::IllConditioned(m)) => {
            log::warn!("elliptic solve ill-conditioned: {m}");
            Some(BreakdownCause::BallConditionBreach { radius: 0.0 })
        }
        ModelError::Step(StepError::ConstraintViolation(m)) => Some(BreakdownCause::TubeViolation(m.clone())),
        _ => None,
    }
}

/// Channels that depend only on the interface.
fn geometric_channels(ev: MsEvaluation, state: &MsState) -> [f64; 4] {
    let gamma = &ev.interface;
    let ball = tube_and_ball(gamma, state.container()).map(|d| d.r_ball).unwrap_or(0.0);
    let residual = ev.normal_velocity.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    [gamma.perimeter(), gamma.area(), ball, residual]
}

struct Recorder {
    traj: Trajectory<MsState>,
    monitors: Monitors,
    stop_residual: Option<f64>,
}

impl Recorder {
    /// Record one state; returns a termination if a monitor fires.
    fn record(&mut self, t: f64, state: &MsState, problem: &MsProblem, ev: &MsEvaluation) -> Result<Option<Termination>, DynamicsError> {
        let gamma = &ev.interface;
        let ball = tube_and_ball(gamma, state.container()).map(|d| d.r_ball).unwrap_or(0.0);
        let residual = ev.normal_velocity.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let a = state.height().tube().a;
        let eta = VALIDITY_MARGIN * a - state.height().sup_norm();
        let norm = problem.norms().norm(Space::Trace, state.height().values());
        self.traj.times.push(t);
        let mut stored = state.clone();
        stored.cache(ev);
        self.traj.states.push(stored);
        self.traj.channels.push([gamma.perimeter(), gamma.area(), residual, ball, eta, norm, dirichlet_energy(&ev.solution)]);
        let m = self.monitors;
        let cause = if ball < m.ball_radius {
            Some(BreakdownCause::BallConditionBreach { radius: ball })
        } else if !(norm <= m.norm_bound) {
            Some(BreakdownCause::NormBlowup { norm })
        } else if eta < m.eta_fraction * a {
            Some(BreakdownCause::ConstraintMargin { eta })
        } else {
            None
        };
        if let Some(cause) = cause {
            return Ok(Some(Termination::Breakdown { time: t, cause }));
        }
        if self.stop_residual.is_some_and(|r| residual < r) {
            return Ok(Some(Termination::ResidualReached));
        }
        Ok(None)
    }
}

/// Reparameterize ahead of the margin monitor; `Err` carries a breakdown.
fn recenter(
    state: &mut MsState,
    problem: &mut MsProblem,
    rec: &mut Recorder,
    t: f64,
    opts: &EvolveOptions,
) -> Result<Result<(), Termination>, DynamicsError> {
    let a = state.height().tube().a;
    let limit = VALIDITY_MARGIN * a - opts.monitors.eta_fraction * a;
    match reparameterize_above(state, limit) {
        Ok(Some(next)) => {
            let c = next.base().circle().expect("reparameterized bases are circles");
            let next_problem = MsProblem::new(next.container(), next.base().clone(), opts.p, opts.mu)?;
            let before = geometric_channels(problem.evaluate(state.height().values())?, state);
            let after = geometric_channels(next_problem.evaluate(next.height().values())?, &next);
            let mismatch = before.iter().zip(&after).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            log::info!("t = {t:.6}: reference circle moved to ({:.4}, {:.4}), R = {:.4}", c.center.x, c.center.y, c.radius);
            rec.traj.events.push(Event {
                time: t,
                kind: EventKind::Reparameterized { center: (c.center.x, c.center.y), radius: c.radius, mismatch },
            });
            *problem = next_problem;
            *state = next;
            Ok(Ok(()))
        }
        Ok(None) => Ok(Ok(())),
        Err(DynamicsError::Hanzawa(h)) | Err(DynamicsError::Model(ModelError::Hanzawa(h))) => {
            Ok(Err(Termination::Breakdown { time: t, cause: BreakdownCause::TubeViolation(h.to_string()) }))
        }
        Err(e) => Err(e),
    }
}

/// Run the Mullins-Sekerka flow from `initial` with full monitoring.
pub fn evolve_ms(initial: MsState, opts: &EvolveOptions) -> Result<Trajectory<MsState>, DynamicsError> {
    let mut state = initial;
    let mut problem = MsProblem::new(state.container(), state.base().clone(), opts.p, opts.mu)?;
    let mut rec = Recorder {
        traj: Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            channels: Channels::default(),
            events: Vec::new(),
            termination: Termination::HorizonReached,
        },
        monitors: opts.monitors,
        stop_residual: opts.stop_residual,
    };
    let finish = |mut rec: Recorder, term: Termination| {
        rec.traj.termination = term;
        Ok(rec.traj)
    };
    let eps = 1e-12 * opts.horizon.max(1.0);
    let mut t = 0.0;
    match opts.mode {
        Mode::SemiImplicit { dt } => loop {
            if let Err(term) = recenter(&mut state, &mut problem, &mut rec, t, opts)? {
                return finish(rec, term);
            }
            let ev = match problem.evaluate(state.height().values()) {
                Ok(ev) => ev,
                Err(e) => match breakdown_cause(&e) {
                    Some(cause) => return finish(rec, Termination::Breakdown { time: t, cause }),
                    None => return Err(e.into()),
                },
            };
            if let Some(term) = rec.record(t, &state, &problem, &ev)? {
                return finish(rec, term);
            }
            if t >= opts.horizon - eps {
                return finish(rec, Termination::HorizonReached);
            }
            let h = dt.min(opts.horizon - t);
            let (a, f) = problem.split_from(&ev);
            let rhs: Vec<f64> = state.height().values().iter().zip(&f).map(|(u, fi)| u + h * fi).collect();
            let next = a.implicit_solve(h, &rhs)?;
            state = state.with_heights(next);
            t += h;
        },
        Mode::Picard { window, steps } => {
            let picard = PicardOptions::default();
            let mut first = true;
            loop {
                if let Err(term) = recenter(&mut state, &mut problem, &mut rec, t, opts)? {
                    return finish(rec, term);
                }
                let ev = match problem.evaluate(state.height().values()) {
                    Ok(ev) => ev,
                    Err(e) => match breakdown_cause(&e) {
                        Some(cause) => return finish(rec, Termination::Breakdown { time: t, cause }),
                        None => return Err(e.into()),
                    },
                };
                if first {
                    if let Some(term) = rec.record(t, &state, &problem, &ev)? {
                        return finish(rec, term);
                    }
                }
                if t >= opts.horizon - eps {
                    return finish(rec, Termination::HorizonReached);
                }
                let len = window.min(opts.horizon - t);
                let q = if first { default_grading(opts.p, opts.mu) } else { 1.0 };
                let grid = WeightedGrid::new(len, steps, q, opts.p, opts.mu)?;
                first = false;
                let (sol, diag) = match picard_window(&problem, state.height().values(), &grid, &picard) {
                    Ok(r) => r,
                    Err(StepError::NoContraction { .. }) => {
                        let cause = BreakdownCause::NoContraction(format!("window at t = {t:.6}"));
                        return finish(rec, Termination::Breakdown { time: t, cause });
                    }
                    Err(StepError::ConstraintViolation(m)) => {
                        return finish(rec, Termination::Breakdown { time: t, cause: BreakdownCause::TubeViolation(m) });
                    }
                    Err(e) => return Err(e.into()),
                };
                for (tau, v) in sol.times.iter().zip(&sol.states).skip(1) {
                    let s = state.with_heights(v.clone());
                    let ev = problem.evaluate(v)?;
                    if let Some(term) = rec.record(t + tau, &s, &problem, &ev)? {
                        return finish(rec, term);
                    }
                }
                t += diag.window;
                state = state.with_heights(sol.last().to_vec());
            }
        }
    }
}

/// Drive a generic quasilinear problem through `continue_solution`; only the
/// `X_γ` channel applies.
pub fn evolve_quasilinear<P: QuasilinearProblem>(
    problem: &P,
    u0: &[f64],
    horizon: f64,
    policy: &ContinuationPolicy,
) -> Result<Trajectory<Vec<f64>>, DynamicsError> {
    let res = continue_solution(problem, u0, horizon, policy)?;
    let mut channels = Channels::default();
    for u in &res.solution.states {
        let norm = problem.norms().norm(Space::Trace, u);
        channels.push([f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, norm, f64::NAN]);
    }
    let termination = match res.outcome {
        Outcome::HorizonReached => Termination::HorizonReached,
        Outcome::FiniteTimeBreakdown { time, cause } => {
            let cause = if cause.contains("exceeds") {
                BreakdownCause::NormBlowup { norm: channels.xgamma_norm.last().copied().unwrap_or(f64::NAN) }
            } else {
                BreakdownCause::NoContraction(cause)
            };
            Termination::Breakdown { time, cause }
        }
    };
    Ok(Trajectory { times: res.solution.times, states: res.solution.states, channels, events: Vec::new(), termination })
}
