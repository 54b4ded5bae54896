use std::f64::consts::PI;

use msflow::models::{make_second_order, LinearSystem};
use msflow::stepper::*;
use nalgebra::DMatrix;

const P: f64 = 4.0;
const MU: f64 = 0.9;

fn sine(m: usize, amp: f64) -> Vec<f64> {
    (1..=m).map(|i| amp * (PI * i as f64 / (m + 1) as f64).sin()).collect()
}

fn heat_error(steps: usize) -> f64 {
    let m = 63;
    let prob = make_second_order(|_, _| 1.0, |_, _| 0.0, m, P, MU);
    let grid = WeightedGrid::uniform(0.1, steps, P, MU).unwrap();
    let (sol, diag) = picard_window(&prob, &sine(m, 1.0), &grid, &PicardOptions::default()).unwrap();
    assert_eq!(diag.iterations, 1);
    let exact = sine(m, (-PI * PI * 0.1).exp());
    sol.last().iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[test]
fn heat_matches_eigen_decay_first_order() {
    let e1 = heat_error(50);
    let e2 = heat_error(100);
    let e3 = heat_error(200);
    assert!(e1 < 2e-2, "{e1}");
    let (r1, r2) = (e1 / e2, e2 / e3);
    assert!(r1 > 1.7 && r1 < 2.3 && r2 > 1.7 && r2 < 2.3, "{r1} {r2}");
}

#[test]
fn constant_linear_problem_needs_one_iteration() {
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 1.0]);
    let prob = LinearSystem::new(a, vec![1.0, -1.0], NormSuite::euclidean(3.0));
    let grid = WeightedGrid::graded(1.0, 30, 3.0, 0.8).unwrap();
    let (_, diag) = picard_window(&prob, &[0.3, 0.2], &grid, &PicardOptions::default()).unwrap();
    assert_eq!(diag.iterations, 1);
    assert_eq!(diag.kappa, 0.0);
}

#[test]
fn contraction_improves_as_window_halves() {
    let m = 31;
    let prob = make_second_order(|u, _| 1.0 + u * u, |_, _| 0.0, m, P, MU);
    let u0 = sine(m, 0.5);
    let mut kappas = Vec::new();
    for k in 0..4 {
        let t = 0.2 / 2f64.powi(k);
        let grid = WeightedGrid::graded(t, 40, P, MU).unwrap();
        let (_, diag) = picard_window(&prob, &u0, &grid, &PicardOptions::default()).unwrap();
        assert!(diag.kappa < 1.0 && diag.halvings == 0);
        kappas.push(diag.kappa);
    }
    assert!(kappas.windows(2).all(|w| w[1] < w[0]), "{kappas:?}");
}

#[test]
fn shift_preserves_fixed_point() {
    let m = 31;
    let prob = make_second_order(|_, _| 1.0, |_, _| 0.0, m, P, MU);
    let grid = WeightedGrid::uniform(0.05, 40, P, MU).unwrap();
    let u0 = sine(m, 1.0);
    let (a, _) = picard_window(&prob, &u0, &grid, &PicardOptions::default()).unwrap();
    let shifted = spectral_shift(make_second_order(|_, _| 1.0, |_, _| 0.0, m, P, MU), 1.0).unwrap();
    let (b, _) = picard_window(&shifted, &u0, &grid, &PicardOptions::default()).unwrap();
    for (x, y) in a.states.iter().flatten().zip(b.states.iter().flatten()) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn shift_stabilizes_negative_scalar() {
    let raw = LinearSystem::scalar(-0.5, 0.0, 2.0);
    let shifted = spectral_shift(LinearSystem::scalar(-0.5, 0.0, 2.0), 1.0).unwrap();
    let dt = 1.0;
    let a = raw.freeze(&[0.0]).unwrap();
    let b = shifted.freeze(&[0.0]).unwrap();
    assert!(a.implicit_solve(dt, &[1.0]).unwrap()[0].abs() > 1.0);
    assert!(b.implicit_solve(dt, &[1.0]).unwrap()[0].abs() < 1.0);
}

fn policy(window: f64, steps: usize) -> ContinuationPolicy {
    ContinuationPolicy {
        window,
        steps_per_window: steps,
        p: P,
        mu: MU,
        grading: None,
        blowup_norm: 1e6,
        picard: PicardOptions::default(),
    }
}

#[test]
fn heat_continuation_reaches_horizon() {
    let m = 31;
    let prob = make_second_order(|_, _| 1.0, |_, _| 0.0, m, P, MU);
    let res = continue_solution(&prob, &sine(m, 1.0), 1.0, &policy(0.25, 40)).unwrap();
    assert_eq!(res.outcome, Outcome::HorizonReached);
    assert!((res.solution.end_time() - 1.0).abs() < 1e-12);
    let zero = continue_solution(&prob, &vec![0.0; m], 0.5, &policy(0.25, 10)).unwrap();
    assert!(zero.solution.states.iter().flatten().all(|x| *x == 0.0));
}

#[test]
fn two_windows_match_one_for_linear_problem() {
    let m = 15;
    let prob = make_second_order(|_, _| 1.0, |_, _| 0.0, m, P, MU);
    let u0 = sine(m, 1.0);
    let one = march(&prob, &u0, 0.01, 20).unwrap();
    let half = march(&prob, &u0, 0.01, 10).unwrap();
    let rest = march(&prob, half.last(), 0.01, 10).unwrap();
    for (x, y) in one.last().iter().zip(rest.last()) {
        assert!((x - y).abs() < 1e-12);
    }
    let uni = PicardOptions::default();
    let g1 = WeightedGrid::uniform(0.2, 20, P, MU).unwrap();
    let g2 = WeightedGrid::uniform(0.1, 10, P, MU).unwrap();
    let (a, _) = picard_window(&prob, &u0, &g1, &uni).unwrap();
    let (b, _) = picard_window(&prob, &u0, &g2, &uni).unwrap();
    let (c, _) = picard_window(&prob, b.last(), &g2, &uni).unwrap();
    for (x, y) in a.last().iter().zip(c.last()) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn reaction_blowup_near_ode_time() {
    let m = 31;
    let u0 = 50.0;
    let prob = make_second_order(|_, _| 1.0, |u, _| u * u, m, P, MU);
    let res = continue_solution(&prob, &vec![u0; m], 0.1, &policy(0.005, 20)).unwrap();
    match res.outcome {
        Outcome::FiniteTimeBreakdown { time, .. } => {
            let t_ode = 1.0 / u0;
            assert!((time - t_ode).abs() < 0.2 * t_ode, "breakdown at {time}");
        }
        other => panic!("expected breakdown, got {other:?}"),
    }
}

#[test]
fn dependence_constant_is_stable() {
    let m = 31;
    let prob = make_second_order(|u, _| 1.0 + u * u, |_, _| 0.0, m, P, MU);
    let grid = WeightedGrid::graded(0.05, 40, P, MU).unwrap();
    let u1 = sine(m, 0.5);
    let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|eps| {
            let u2: Vec<f64> = u1
                .iter()
                .enumerate()
                .map(|(i, v)| v + eps * (2.0 * PI * (i + 1) as f64 / (m + 1) as f64).sin())
                .collect();
            dependence_ratio(&prob, &u1, &u2, &grid, &PicardOptions::default()).unwrap()
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    assert!(hi / lo < 2.0, "{ratios:?}");
}
