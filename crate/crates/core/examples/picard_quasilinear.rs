//! Picard windows on a weighted time grid for 1D quasilinear problems:
//! contraction as the window shrinks, continuation to breakdown, and the
//! continuous-dependence constant.
use std::f64::consts::PI;

use msflow::models::make_second_order;
use msflow::stepper::{
    compute_mu0, continue_solution, dependence_ratio, picard_window, ContinuationPolicy, Mu0Kind, Outcome, PicardOptions,
    WeightedGrid,
};

const P: f64 = 4.0;
const MU: f64 = 0.9;
const M: usize = 31;

fn sine(amp: f64) -> Vec<f64> {
    (1..=M).map(|i| amp * (PI * i as f64 / (M + 1) as f64).sin()).collect()
}

fn main() {
    println!("mu0 = {:.4} for p = {P}", compute_mu0(1, P, Mu0Kind::SecondOrder).unwrap());

    let diffusion = make_second_order(|u, _| 1.0 + u * u, |_, _| 0.0, M, P, MU);
    println!("\nu_t = (1 + u^2) u_xx, u0 = 0.5 sin(pi x)");
    println!("{:>10} {:>6} {:>10}", "T", "iters", "kappa");
    for k in 0..5 {
        let grid = WeightedGrid::graded(0.2 / 2f64.powi(k), 40, P, MU).unwrap();
        let (_, d) = picard_window(&diffusion, &sine(0.5), &grid, &PicardOptions::default()).unwrap();
        println!("{:10.5} {:6} {:10.5}", grid.horizon(), d.iterations, d.kappa);
    }

    let grid = WeightedGrid::graded(0.05, 40, P, MU).unwrap();
    let u1 = sine(0.5);
    println!("\ncontinuous dependence, |u1 - u2|_E / |u1(0) - u2(0)|");
    for eps in [1e-2, 1e-3, 1e-4] {
        let u2: Vec<f64> = u1.iter().enumerate().map(|(i, v)| v + eps * (2.0 * PI * (i + 1) as f64 / (M + 1) as f64).sin()).collect();
        println!("  eps {eps:.0e}: {:.6}", dependence_ratio(&diffusion, &u1, &u2, &grid, &PicardOptions::default()).unwrap());
    }

    let policy = ContinuationPolicy {
        window: 0.005,
        steps_per_window: 20,
        p: P,
        mu: MU,
        grading: None,
        blowup_norm: 1e6,
        picard: PicardOptions::default(),
    };
    let reaction = make_second_order(|_, _| 1.0, |u, _| u * u, M, P, MU);
    let res = continue_solution(&reaction, &vec![50.0; M], 0.1, &policy).unwrap();
    println!("\nu_t = u_xx + u^2 from u = 50 (ODE blow-up at t = 0.02):");
    match res.outcome {
        Outcome::FiniteTimeBreakdown { time, cause } => println!("  breakdown at t = {time:.6}: {cause}"),
        Outcome::HorizonReached => println!("  reached the horizon"),
    }
    println!("  {} windows", res.windows.len());
}
