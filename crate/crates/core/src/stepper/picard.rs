use super::{e1_norm, sub, FrozenOperator, QuasilinearProblem, Space, StepError, WeightedGrid};

/// Discrete trajectory: states at `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Solution {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("solutions hold at least the initial state")
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("solutions hold at least the initial time")
    }
}

/// Observed surrogates for the constants of the contraction argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionDiagnostics {
    /// Largest ratio of successive iterate distances.
    pub kappa: f64,
    /// `max |A(v)u − A(v')u|_{X_0} / (|v − v'|_{X_{γ,μ}} |u|_{X_1})` over the last two iterates.
    pub lipschitz_a: Option<f64>,
    /// `max |F(v) − F(v')|_{X_0} / |v − v'|_{X_{γ,μ}}` over the last two iterates.
    pub lipschitz_f: Option<f64>,
    /// Continuous-dependence ratio, filled by `dependence_ratio`.
    pub dependence: Option<f64>,
    /// Window length actually used.
    pub window: f64,
    /// `E_{1,μ}` distance between the fixed point and the reference solution.
    pub radius: f64,
    /// Largest `X_{γ,μ}` excursion of the fixed point from its initial value.
    pub ball: f64,
    pub iterations: usize,
    pub halvings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Relative tolerance on the `E_{1,μ}` distance of successive iterates.
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 60, max_halvings: 20 }
    }
}

enum Attempt {
    Converged(Solution, ContractionDiagnostics),
    Diverged(f64),
}

fn iterate<P: QuasilinearProblem>(
    problem: &P,
    u0: &[f64],
    u1: &[f64],
    grid: &WeightedGrid,
    opts: &PicardOptions,
) -> Result<Attempt, StepError> {
    let (a0, f0) = problem.split(u0)?;
    let nodes = grid.nodes();
    let suite = problem.norms();
    let dist = |a: &[Vec<f64>], b: &[Vec<f64>]| -> Result<f64, StepError> {
        let d: Vec<Vec<f64>> = a.iter().zip(b).map(|(x, y)| sub(x, y)).collect();
        e1_norm(&d, grid, suite)
    };

    // Reference solution of u' + A(u0)u = F(u0); for a linear problem with
    // constant data it is already the fixed point.
    let mut reference = vec![u1.to_vec()];
    for j in 1..nodes.len() {
        let dt = grid.dt(j);
        let rhs: Vec<f64> = reference[j - 1].iter().zip(&f0).map(|(u, f)| u + dt * f).collect();
        reference.push(a0.implicit_solve(dt, &rhs)?);
    }

    let mut current = reference.clone();
    let mut previous: Option<Vec<Vec<f64>>>;
    let mut last_dist: Option<f64> = None;
    let mut kappa: f64 = 0.0;
    for it in 1..=opts.max_iter {
        let mut next = vec![u1.to_vec()];
        for j in 1..nodes.len() {
            let v = &current[j];
            problem.check_admissible(v)?;
            let (av, f) = problem.split(v)?;
            let correction = sub(&a0.apply(v), &av.apply(v));
            let dt = grid.dt(j);
            let rhs: Vec<f64> = next[j - 1]
                .iter()
                .zip(f.iter().zip(&correction))
                .map(|(u, (fi, ci))| u + dt * (fi + ci))
                .collect();
            let u = a0.implicit_solve(dt, &rhs)?;
            if u.iter().any(|x| !x.is_finite()) {
                return Ok(Attempt::Diverged(f64::INFINITY));
            }
            next.push(u);
        }
        let d = dist(&next, &current)?;
        let scale = e1_norm(&next, grid, suite)?.max(f64::MIN_POSITIVE);
        if let Some(prev) = last_dist {
            if prev > 1e3 * f64::EPSILON * scale {
                kappa = kappa.max(d / prev);
            }
        }
        if !d.is_finite() {
            return Ok(Attempt::Diverged(f64::INFINITY));
        }
        if kappa >= 1.0 {
            return Ok(Attempt::Diverged(kappa));
        }
        previous = Some(std::mem::replace(&mut current, next));
        last_dist = Some(d);
        if d <= opts.tol * scale {
            let (lipschitz_a, lipschitz_f) = match &previous {
                Some(prev) if it > 1 => lipschitz_estimates(problem, &current, prev)?,
                _ => (None, None),
            };
            let ball = current
                .iter()
                .map(|u| suite.norm(Space::TraceMu, &sub(u, u1)))
                .fold(0.0, f64::max);
            let diag = ContractionDiagnostics {
                kappa,
                lipschitz_a,
                lipschitz_f,
                dependence: None,
                window: grid.horizon(),
                radius: dist(&current, &reference)?,
                ball,
                iterations: it,
                halvings: 0,
            };
            return Ok(Attempt::Converged(Solution { times: nodes.to_vec(), states: current }, diag));
        }
    }
    Ok(Attempt::Diverged(kappa.max(1.0)))
}

fn lipschitz_estimates<P: QuasilinearProblem>(
    problem: &P,
    a: &[Vec<f64>],
    b: &[Vec<f64>],
) -> Result<(Option<f64>, Option<f64>), StepError> {
    let suite = problem.norms();
    let mut la: Option<f64> = None;
    let mut lf: Option<f64> = None;
    for (v, w) in a.iter().zip(b).skip(1) {
        let dv = suite.norm(Space::TraceMu, &sub(v, w));
        if dv <= 1e-13 * suite.norm(Space::TraceMu, v).max(1e-300) {
            continue;
        }
        let (av, fv) = problem.split(v)?;
        let (aw, fw) = problem.split(w)?;
        let df = suite.norm(Space::X0, &sub(&fv, &fw)) / dv;
        lf = Some(lf.map_or(df, |x| x.max(df)));
        let u1 = suite.norm(Space::X1, v);
        if u1 > 0.0 {
            let da = suite.norm(Space::X0, &sub(&av.apply(v), &aw.apply(v))) / (dv * u1);
            la = Some(la.map_or(da, |x| x.max(da)));
        }
    }
    Ok((la, lf))
}

/// Fixed point of the Picard map with `A` frozen at `u0` and initial value
/// `u1`, halving the window while the map fails to contract.
pub fn picard_window_about<P: QuasilinearProblem>(
    problem: &P,
    u0: &[f64],
    u1: &[f64],
    grid: &WeightedGrid,
    opts: &PicardOptions,
) -> Result<(Solution, ContractionDiagnostics), StepError> {
    if u1.len() != problem.dim() || u0.len() != problem.dim() {
        return Err(StepError::ParameterOutOfRange(format!("state dimension must be {}", problem.dim())));
    }
    problem.check_admissible(u1)?;
    let mut grid = grid.clone();
    let mut kappa = 0.0;
    for halvings in 0..=opts.max_halvings {
        match iterate(problem, u0, u1, &grid, opts)? {
            Attempt::Converged(sol, mut diag) => {
                diag.halvings = halvings;
                return Ok((sol, diag));
            }
            Attempt::Diverged(k) => {
                kappa = k;
                if halvings < opts.max_halvings {
                    log::debug!("window {:.3e} does not contract (kappa {k:.3}), halving", grid.horizon());
                    grid = grid.rescaled(grid.horizon() / 2.0)?;
                }
            }
        }
    }
    Err(StepError::NoContraction { window: grid.horizon(), kappa, halvings: opts.max_halvings })
}

pub fn picard_window<P: QuasilinearProblem>(
    problem: &P,
    u1: &[f64],
    grid: &WeightedGrid,
    opts: &PicardOptions,
) -> Result<(Solution, ContractionDiagnostics), StepError> {
    picard_window_about(problem, u1, u1, grid, opts)
}

/// `‖u(·;u₁) − u(·;u₂)‖_{E_{1,μ}} / |u₁ − u₂|_{X_{γ,μ}}` on a common grid.
pub fn dependence_ratio<P: QuasilinearProblem>(
    problem: &P,
    u1: &[f64],
    u2: &[f64],
    grid: &WeightedGrid,
    opts: &PicardOptions,
) -> Result<f64, StepError> {
    let fixed = PicardOptions { max_halvings: 0, ..*opts };
    let (a, _) = picard_window(problem, u1, grid, &fixed)?;
    let (b, _) = picard_window(problem, u2, grid, &fixed)?;
    let d: Vec<Vec<f64>> = a.states.iter().zip(&b.states).map(|(x, y)| sub(x, y)).collect();
    let num = e1_norm(&d, grid, problem.norms())?;
    let den = problem.norms().norm(Space::TraceMu, &sub(u1, u2));
    if den == 0.0 {
        return Err(StepError::ParameterOutOfRange("initial states coincide".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationPolicy {
    /// Length of the first (graded) window and cap for later windows.
    pub window: f64,
    pub steps_per_window: usize,
    pub p: f64,
    pub mu: f64,
    /// Grading exponent of the first window; `None` selects the default.
    pub grading: Option<f64>,
    /// Breakdown is declared once the `X_{γ,μ}` norm exceeds this bound.
    pub blowup_norm: f64,
    pub picard: PicardOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    HorizonReached,
    /// Continuation stopped at `time`, the last time with a valid solution.
    FiniteTimeBreakdown { time: f64, cause: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationResult {
    pub solution: Solution,
    pub outcome: Outcome,
    pub windows: Vec<ContractionDiagnostics>,
}

/// Glue Picard windows up to `horizon`; the first window is graded, later
/// ones uniform. A window that will not contract ends the run with a
/// breakdown marker instead of an error.
pub fn continue_solution<P: QuasilinearProblem>(
    problem: &P,
    u0: &[f64],
    horizon: f64,
    policy: &ContinuationPolicy,
) -> Result<ContinuationResult, StepError> {
    problem.check_admissible(u0)?;
    let mut solution = Solution { times: vec![0.0], states: vec![u0.to_vec()] };
    let mut windows = Vec::new();
    let mut t = 0.0;
    let mut length = policy.window.min(horizon);
    let suite = problem.norms();
    let breakdown = |solution: Solution, windows, time, cause: String| ContinuationResult {
        solution,
        outcome: Outcome::FiniteTimeBreakdown { time, cause },
        windows,
    };
    while t < horizon * (1.0 - 1e-12) {
        let len = length.min(horizon - t);
        let grid = if windows.is_empty() {
            let q = policy.grading.unwrap_or_else(|| super::default_grading(policy.p, policy.mu));
            WeightedGrid::new(len, policy.steps_per_window, q, policy.p, policy.mu)?
        } else {
            WeightedGrid::uniform(len, policy.steps_per_window, policy.p, policy.mu)?
        };
        let start = solution.last().to_vec();
        let (sol, diag) = match picard_window(problem, &start, &grid, &policy.picard) {
            Ok(r) => r,
            Err(e @ StepError::NoContraction { .. }) | Err(e @ StepError::ConstraintViolation(_)) => {
                return Ok(breakdown(solution, windows, t, e.to_string()));
            }
            Err(e) => return Err(e),
        };
        let used = diag.window;
        for (tau, u) in sol.times.iter().zip(&sol.states).skip(1) {
            solution.times.push(t + tau);
            solution.states.push(u.clone());
        }
        t += used;
        windows.push(diag);
        let size = suite.norm(Space::TraceMu, solution.last());
        if !(size <= policy.blowup_norm) {
            return Ok(breakdown(solution, windows, t, format!("norm {size:.3e} exceeds {:.3e}", policy.blowup_norm)));
        }
        length = (2.0 * used).min(policy.window);
    }
    Ok(ContinuationResult { solution, outcome: Outcome::HorizonReached, windows })
}
