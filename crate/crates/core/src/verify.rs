//! Oracle and invariant checks, grouped by module, with a plain-text report.
//!
//! Reports contain no timings or addresses, so reruns with the same seed are
//! byte-identical.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    evolve_ms, linearize_at, ljapunov_trace, maybe_reparameterize, omega_limit_report, DynamicsError, EvolveOptions,
    Stability, Termination,
};
use crate::elliptic::{concentric_jump_eigenvalue, dirichlet_energy, dtn_jump, solve_two_phase, TwoPhaseOperator};
use crate::geometry::{
    bundle_distance, io, tube_and_ball, BundleOrder, Circle, Container, CurveSpec, LevelFunction, Point, ReferenceCurve,
};
use crate::hanzawa::HeightField;
use crate::models::{make_second_order, LinearSystem, MsState};
use crate::spectral::real_modes;
use crate::stepper::{
    compute_mu0, continue_solution, dependence_ratio, picard_window, ContinuationPolicy, Mu0Kind, NormSuite, Outcome,
    PicardOptions, WeightedGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Elliptic,
    Stepper,
    Dynamics,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 4] = [Suite::Geometry, Suite::Elliptic, Suite::Stepper, Suite::Dynamics];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Elliptic => "elliptic",
            Suite::Stepper => "stepper",
            Suite::Dynamics => "dynamics",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        [Suite::Geometry, Suite::Elliptic, Suite::Stepper, Suite::Dynamics, Suite::All].into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Collector {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Collector {
    fn new(suite: &'static str) -> Self {
        Self { suite, checks: Vec::new() }
    }

    /// Record a check; an `Err` from the body is a failure carrying its message.
    fn check(&mut self, name: &'static str, body: impl FnOnce() -> Result<(bool, String), String>) {
        let (passed, detail) = match body() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check { suite: self.suite, name, passed, detail });
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn circle(center: Point, r: f64, n: usize) -> Result<ReferenceCurve, String> {
    ReferenceCurve::build(&CurveSpec::Circle(Circle::new(center, r)), n, &Container::unit()).map_err(s)
}

fn ellipse(n: usize) -> Result<ReferenceCurve, String> {
    ReferenceCurve::build(&CurveSpec::Ellipse { center: Point::zeros(), semi_axes: (0.5, 0.4) }, n, &Container::unit()).map_err(s)
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn geometry(seed: u64) -> Vec<Check> {
    let mut c = Collector::new("geometry");
    c.check("circle curvature is 1/R", || {
        let g = circle(Point::zeros(), 0.4, 64)?;
        let err = max_abs(g.curvature().iter().map(|k| k - 2.5));
        Ok((err < 1e-12, format!("max |kappa - 2.5| = {err:.2e}")))
    });
    c.check("ellipse max curvature", || {
        let k = ellipse(128)?.kappa_max();
        Ok(((k - 3.125).abs() < 1e-10, format!("kappa_max = {k:.12}")))
    });
    c.check("circle tube width", || {
        let t = tube_and_ball(&circle(Point::zeros(), 0.4, 64)?, &Container::unit()).map_err(s)?;
        Ok(((t.a - 0.36).abs() < 1e-12 && (t.r_ball - 0.4).abs() < 1e-12, format!("a = {:.12}, r_ball = {:.12}", t.a, t.r_ball)))
    });
    c.check("ellipse tube width", || {
        let t = tube_and_ball(&ellipse(128)?, &Container::unit()).map_err(s)?;
        Ok(((t.r_ball - 0.32).abs() < 1e-3 && (t.a - 0.288).abs() < 1e-3, format!("a = {:.6}, r_ball = {:.6}", t.a, t.r_ball)))
    });
    c.check("clearance-limited ball", || {
        let container = Container::disk(0.45).map_err(s)?;
        let g = ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(0.4)), 64, &container).map_err(s)?;
        let t = tube_and_ball(&g, &container).map_err(s)?;
        Ok(((t.r_ball - 0.05).abs() < 1e-12, format!("r_ball = {:.12}", t.r_ball)))
    });
    c.check("projection round trip", || {
        let spec = CurveSpec::Radial { center: Point::new(0.05, -0.02), cos: vec![0.4, 0.0, 0.03, 0.01], sin: vec![0.0, 0.02] };
        let g = ReferenceCurve::build(&spec, 128, &Container::unit()).map_err(s)?;
        let a = tube_and_ball(&g, &Container::unit()).map_err(s)?.a;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..2000 {
            let x = g.lift(rng.random_range(0.0..TAU), rng.random_range(-0.95..0.95) * a);
            let p = g.project(&x).map_err(s)?;
            worst = worst.max((p.foot + p.normal * p.distance - x).norm());
        }
        Ok((worst < 1e-9, format!("max error {worst:.2e} over 2000 points")))
    });
    c.check("Gauss-Bonnet on the ellipse", || {
        let total = ellipse(128)?.total_curvature();
        Ok(((total - TAU).abs() < 1e-8, format!("integral of kappa = {total:.12}")))
    });
    c.check("bundle distance of concentric circles", || {
        let (a, b) = (circle(Point::zeros(), 0.4, 64)?, circle(Point::zeros(), 0.5, 64)?);
        let d0 = bundle_distance(&a, &b, BundleOrder::Position);
        let d2 = bundle_distance(&a, &b, BundleOrder::SecondNormal);
        Ok(((d0 - 0.1).abs() < 1e-12 && (d2 - 0.5).abs() < 1e-12, format!("order 0: {d0:.12}, order 2: {d2:.12}")))
    });
    c.check("level function values", || {
        let g = circle(Point::zeros(), 0.4, 64)?;
        let t = tube_and_ball(&g, &Container::unit()).map_err(s)?;
        let lf = LevelFunction::new(g, t);
        let on = lf.eval(&Point::new(0.4, 0.0)).map_err(s)?;
        let near = lf.eval(&Point::new(0.4 + 0.1 * t.a, 0.0)).map_err(s)?;
        let far = lf.eval(&Point::new(0.4 + 1.1 * t.a, 0.0)).map_err(s)?;
        let ok = on.abs() < 1e-15 && (near - 0.1 * t.a).abs() < 1e-14 && far == 1.0;
        Ok((ok, format!("{on:.3e}, {near:.12}, {far}")))
    });
    c.check("curve file round trip", || {
        let g = ellipse(64)?;
        let (back, _) = io::read_curve(&io::write_curve(&g, &Container::unit())).map_err(s)?;
        let err = g.points().iter().zip(back.points()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        Ok((err < 1e-14, format!("max node error {err:.2e}")))
    });
    c.checks
}

fn mode(g: &ReferenceCurve, k: usize, phase: f64) -> Vec<f64> {
    (0..g.len()).map(|j| (k as f64 * g.theta(j) - phase).cos()).collect()
}

fn elliptic(seed: u64) -> Vec<Check> {
    let mut c = Collector::new("elliptic");
    let jump2 = |n: usize| -> Result<f64, String> {
        let g = circle(Point::zeros(), 0.5, n)?;
        Ok(real_modes(&dtn_jump(&Container::unit(), &g, &mode(&g, 2, 0.0)).map_err(s)?)[2].0)
    };
    let want = -128.0 / 17.0;
    c.check("concentric oracle -128/17 at N = 256", || {
        let got = jump2(256)?;
        let rel = (got - want).abs() / want.abs();
        Ok((rel < 1e-8, format!("j_2 = {got:.12}, relative error {rel:.2e}")))
    });
    c.check("spectral convergence", || {
        let errs = [32, 64, 128].iter().map(|n| jump2(*n).map(|j| (j - want).abs())).collect::<Result<Vec<_>, _>>()?;
        let ok = errs.windows(2).all(|w| w[1] <= (w[0] / 10.0).max(1e-11));
        Ok((ok, format!("errors {:.2e} {:.2e} {:.2e}", errs[0], errs[1], errs[2])))
    });
    c.check("Dirichlet energy 64 pi / 17", || {
        let g = circle(Point::zeros(), 0.5, 128)?;
        let e = dirichlet_energy(&solve_two_phase(&Container::unit(), &g, &mode(&g, 2, 0.0)).map_err(s)?);
        let target = 64.0 * PI / 17.0;
        Ok(((e - target).abs() < 1e-9 * target, format!("energy {e:.12}")))
    });
    c.check("constant data has no jump", || {
        let g = circle(Point::new(0.1, 0.05), 0.3, 64)?;
        let err = max_abs(dtn_jump(&Container::unit(), &g, &[1.0; 64]).map_err(s)?);
        Ok((err < 1e-10, format!("max |jump| = {err:.2e}")))
    });
    c.check("compatibility on random star-shaped interfaces", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..4 {
            let cos: Vec<f64> = (0..5).map(|k| if k == 0 { rng.random_range(0.3..0.5) } else { rng.random_range(-0.03..0.03) }).collect();
            let sin: Vec<f64> = (0..5).map(|_| rng.random_range(-0.03..0.03)).collect();
            let center = Point::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
            let g = ReferenceCurve::build(&CurveSpec::Radial { center, cos, sin }, 64, &Container::unit()).map_err(s)?;
            let coef: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let data: Vec<f64> = (0..64)
                .map(|j| coef.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * g.theta(j) + k as f64).cos()).sum())
                .collect();
            let sol = solve_two_phase(&Container::unit(), &g, &data).map_err(s)?;
            worst = worst.max(sol.integrate(sol.jump()).abs() / max_abs(data.iter().copied()));
        }
        Ok((worst < 1e-9, format!("max |integral of jump| / |g| = {worst:.2e}")))
    });
    c.check("rotation equivariance", || {
        let g = circle(Point::zeros(), 0.45, 64)?;
        let op = TwoPhaseOperator::new(&Container::unit(), &g).map_err(s)?;
        let mut worst: f64 = 0.0;
        for k in 1..=8 {
            let a = real_modes(&op.jump(&mode(&g, k, 0.0)).map_err(s)?)[k].0;
            let b = real_modes(&op.jump(&mode(&g, k, 0.5 * PI)).map_err(s)?)[k].1;
            worst = worst.max((a - b).abs() / a.abs());
        }
        Ok((worst < 1e-10, format!("max relative cos/sin mismatch {worst:.2e}")))
    });
    c.check("jump eigenvalues are negative", || {
        let g = circle(Point::zeros(), 0.5, 64)?;
        let op = TwoPhaseOperator::new(&Container::unit(), &g).map_err(s)?;
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for k in 1..=16 {
            let j = real_modes(&op.jump(&mode(&g, k, 0.0)).map_err(s)?)[k].0;
            let exact = concentric_jump_eigenvalue(k as u32, 0.5, 1.0);
            ok &= j < 0.0;
            worst = worst.max((j - exact).abs() / exact.abs());
        }
        Ok((ok && worst < 1e-6, format!("k <= 16, max relative error {worst:.2e}")))
    });
    c.checks
}

fn sine(m: usize, amp: f64) -> Vec<f64> {
    (1..=m).map(|i| amp * (PI * i as f64 / (m + 1) as f64).sin()).collect()
}

fn stepper() -> Vec<Check> {
    const P: f64 = 4.0;
    const MU: f64 = 0.9;
    let mut c = Collector::new("stepper");
    c.check("critical weights", || {
        let a = compute_mu0(1, 4.0, Mu0Kind::SecondOrder).map_err(s)?;
        let b = compute_mu0(2, 6.0, Mu0Kind::MullinsSekerka).map_err(s)?;
        Ok(((a - 7.0 / 8.0).abs() < 1e-15 && (b - 11.0 / 18.0).abs() < 1e-15, format!("{a:.12}, {b:.12}")))
    });
    c.check("linear problem converges in one iteration", || {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 1.0]);
        let prob = LinearSystem::new(a, vec![1.0, -1.0], NormSuite::euclidean(3.0));
        let grid = WeightedGrid::graded(1.0, 30, 3.0, 0.8).map_err(s)?;
        let (_, d) = picard_window(&prob, &[0.3, 0.2], &grid, &PicardOptions::default()).map_err(s)?;
        Ok((d.iterations == 1 && d.kappa == 0.0, format!("iterations {}, kappa {:.2e}", d.iterations, d.kappa)))
    });
    c.check("contraction improves as the window halves", || {
        let m = 31;
        let prob = make_second_order(|u, _| 1.0 + u * u, |_, _| 0.0, m, P, MU);
        let mut kappas = Vec::new();
        for k in 0..4 {
            let grid = WeightedGrid::graded(0.2 / 2f64.powi(k), 40, P, MU).map_err(s)?;
            kappas.push(picard_window(&prob, &sine(m, 0.5), &grid, &PicardOptions::default()).map_err(s)?.1.kappa);
        }
        let ok = kappas[0] < 1.0 && kappas.windows(2).all(|w| w[1] < w[0]);
        Ok((ok, format!("kappa {:.4} {:.4} {:.4} {:.4}", kappas[0], kappas[1], kappas[2], kappas[3])))
    });
    c.check("heat equation converges at first order", || {
        let m = 63;
        let prob = make_second_order(|_, _| 1.0, |_, _| 0.0, m, P, MU);
        let exact = sine(m, (-PI * PI * 0.1).exp());
        let mut errs = Vec::new();
        for steps in [50, 100, 200] {
            let grid = WeightedGrid::uniform(0.1, steps, P, MU).map_err(s)?;
            let (sol, _) = picard_window(&prob, &sine(m, 1.0), &grid, &PicardOptions::default()).map_err(s)?;
            errs.push(max_abs(sol.last().iter().zip(&exact).map(|(a, b)| a - b)));
        }
        let (r1, r2) = (errs[0] / errs[1], errs[1] / errs[2]);
        Ok(((1.7..2.3).contains(&r1) && (1.7..2.3).contains(&r2), format!("ratios {r1:.3} {r2:.3}")))
    });
    let policy = |window: f64, steps: usize| ContinuationPolicy {
        window,
        steps_per_window: steps,
        p: P,
        mu: MU,
        grading: None,
        blowup_norm: 1e6,
        picard: PicardOptions::default(),
    };
    c.check("reaction blow-up near the ODE time", || {
        let m = 31;
        let prob = make_second_order(|_, _| 1.0, |u, _| u * u, m, P, MU);
        let res = continue_solution(&prob, &vec![50.0; m], 0.1, &policy(0.005, 20)).map_err(s)?;
        match res.outcome {
            Outcome::FiniteTimeBreakdown { time, .. } => {
                let rel = (time - 0.02).abs() / 0.02;
                Ok((rel < 0.2, format!("breakdown at t = {time:.6}, relative offset {rel:.3}")))
            }
            Outcome::HorizonReached => Ok((false, "no breakdown detected".into())),
        }
    });
    c.check("heat reaches the horizon", || {
        let m = 31;
        let prob = make_second_order(|_, _| 1.0, |_, _| 0.0, m, P, MU);
        let res = continue_solution(&prob, &sine(m, 1.0), 2.0, &policy(0.25, 40)).map_err(s)?;
        let end = res.solution.end_time();
        Ok((res.outcome == Outcome::HorizonReached && (end - 2.0).abs() < 1e-12, format!("end time {end:.12}")))
    });
    c.check("continuous dependence constant", || {
        let m = 31;
        let prob = make_second_order(|u, _| 1.0 + u * u, |_, _| 0.0, m, P, MU);
        let grid = WeightedGrid::graded(0.05, 40, P, MU).map_err(s)?;
        let u1 = sine(m, 0.5);
        let mut ratios = Vec::new();
        for eps in [1e-2, 1e-3, 1e-4] {
            let u2: Vec<f64> = u1.iter().enumerate().map(|(i, v)| v + eps * (2.0 * PI * (i + 1) as f64 / (m + 1) as f64).sin()).collect();
            ratios.push(dependence_ratio(&prob, &u1, &u2, &grid, &PicardOptions::default()).map_err(s)?);
        }
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
        Ok((hi / lo < 2.0, format!("ratios {:.4} {:.4} {:.4}", ratios[0], ratios[1], ratios[2])))
    });
    c.checks
}

fn dynamics() -> Vec<Check> {
    let mut c = Collector::new("dynamics");
    let unit = Container::unit();
    let lin = circle(Point::zeros(), 0.5, 64)
        .and_then(|b| MsState::circle(b, &unit).map_err(s))
        .and_then(|st| linearize_at(&st, 1e-5).map_err(s));
    c.check("mode-2 rate 1536/17", || {
        let rep = lin.as_ref().map_err(Clone::clone)?;
        let (got, want) = (rep.mode_rate(2), 1536.0 / 17.0);
        Ok(((got - want).abs() < 0.01 * want, format!("rate {got:.6}")))
    });
    c.check("dispersion for modes 2..16", || {
        let rep = lin.as_ref().map_err(Clone::clone)?;
        let worst = (2..=16usize)
            .map(|k| {
                let want = -concentric_jump_eigenvalue(k as u32, 0.5, 1.0) * ((k * k) as f64 - 1.0) / 0.25;
                (rep.mode_rate(k) - want).abs() / want
            })
            .fold(0.0, f64::max);
        Ok((worst < 0.02, format!("max relative error {worst:.2e}")))
    });
    c.check("three-dimensional kernel", || {
        let rep = lin.as_ref().map_err(Clone::clone)?;
        let res = max_abs(rep.kernel_residuals) / rep.norm;
        let ok = rep.kernel_dimension == 3 && res <= 1e-4 && rep.stability == Stability::NormallyStable;
        Ok((ok, format!("dimension {}, max residual / norm {res:.2e}", rep.kernel_dimension)))
    });
    c.check("Fourier block structure", || {
        let rep = lin.as_ref().map_err(Clone::clone)?;
        let leak = rep.leakage();
        Ok((leak < 1e-6, format!("leakage {leak:.2e}")))
    });
    c.check("ellipse is not an equilibrium", || {
        let b = circle(Point::zeros(), 0.5, 32)?;
        let v = (0..32).map(|j| 0.02 * (2.0 * b.theta(j)).cos()).collect();
        let st = MsState::new(HeightField::new(b, &unit, v).map_err(s)?, &unit).map_err(s)?;
        let ok = matches!(linearize_at(&st, 1e-5), Err(DynamicsError::NotAnEquilibrium { .. }));
        Ok((ok, "rejected".into()))
    });
    c.check("mode-2 relaxation", || {
        let b = circle(Point::zeros(), 0.5, 64)?;
        let v = (0..64).map(|j| 0.02 * (2.0 * b.theta(j)).cos()).collect();
        let st = MsState::new(HeightField::new(b, &unit, v).map_err(s)?, &unit).map_err(s)?;
        let opts = EvolveOptions { horizon: 0.25, stop_residual: Some(1e-7), ..Default::default() };
        let traj = evolve_ms(st, &opts).map_err(s)?;
        let lj = ljapunov_trace(&traj);
        let area = &traj.channels.area;
        let drift = (area[area.len() - 1] - area[0]).abs() / area[0];
        let report = omega_limit_report(&traj).map_err(s)?;
        let rate = report.rate.ok_or("no rate fit")?;
        let want = 1536.0 / 17.0;
        let ok = traj.termination == Termination::ResidualReached
            && lj.monotone()
            && drift < 1e-3
            && (rate.omega - want).abs() < 0.05 * want
            && rate.quality >= 0.99;
        Ok((ok, format!("monotone {}, area drift {drift:.2e}, rate {:.4}, quality {:.6}", lj.monotone(), rate.omega, rate.quality)))
    });
    c.check("re-centering a drifting circle", || {
        let b = circle(Point::zeros(), 0.5, 64)?;
        let a = HeightField::zero(b.clone(), &unit).map_err(s)?.tube().a;
        let e = 0.31 * a;
        let v = (0..64)
            .map(|j| {
                let t = b.theta(j);
                e * t.cos() + (0.25 - e * e * t.sin().powi(2)).sqrt() - 0.5
            })
            .collect();
        let st = MsState::circle(b, &unit).map_err(s)?.with_heights(v);
        let r = maybe_reparameterize(&st).map_err(s)?;
        let center = r.base().circle().ok_or("base is not a circle")?.center;
        let sup = r.height().sup_norm();
        Ok(((center - Point::new(e, 0.0)).norm() < 1e-8 && sup < 1e-6, format!("new |rho| = {sup:.2e}")))
    });
    c.checks
}

/// Run one suite, or every module suite concurrently for `Suite::All`.
pub fn run(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Geometry => geometry(seed),
        Suite::Elliptic => elliptic(seed),
        Suite::Stepper => stepper(),
        Suite::Dynamics => dynamics(),
        Suite::All => std::thread::scope(|scope| {
            let handles: Vec<_> = Suite::MODULES.iter().map(|m| scope.spawn(move || run(*m, seed))).collect();
            handles.into_iter().flat_map(|h| h.join().expect("verification suite panicked")).collect()
        }),
    }
}

/// Fixed-width pass/fail table followed by a summary line.
pub fn report(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{mark}  {:<9} {:<width$}  {}", c.suite, c.name, c.detail).unwrap();
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    writeln!(out, "{passed}/{} checks passed", checks.len()).unwrap();
    out
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
