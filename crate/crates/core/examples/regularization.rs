//! Smoothing of rough initial heights: the X_γ norm proxy of a k^-2.2 height
//! at t = 0 grows with resolution, while at t = δ > 0 it settles.
use msflow::dynamics::{evolve_ms, EvolveOptions, Mode, Monitors};
use msflow::geometry::{Circle, Container, CurveSpec, ReferenceCurve};
use msflow::hanzawa::HeightField;
use msflow::models::MsState;

fn rough(n: usize) -> MsState {
    let container = Container::unit();
    let base = ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(0.5)), n, &container).unwrap();
    let v = (0..n)
        .map(|j| (2..=n / 2).map(|k| 0.05 * (k as f64).powf(-2.2) * (k as f64 * base.theta(j)).cos()).sum())
        .collect();
    MsState::new(HeightField::new(base, &container, v).unwrap(), &container).unwrap()
}

fn main() {
    let deltas = [1e-4, 1e-3, 1e-2];
    println!("{:>5} {:>12} {}", "N", "t = 0", deltas.map(|d| format!("{:>12}", format!("t = {d:.0e}"))).join(""));
    for n in [64, 128, 256] {
        let mut row = String::new();
        let mut at_zero = f64::NAN;
        for delta in deltas {
            let opts = EvolveOptions {
                mode: Mode::SemiImplicit { dt: delta / 50.0 },
                horizon: delta,
                monitors: Monitors { norm_bound: f64::INFINITY, ..Default::default() },
                mu: 0.65,
                ..Default::default()
            };
            let traj = evolve_ms(rough(n), &opts).unwrap();
            at_zero = traj.channels.xgamma_norm[0];
            row.push_str(&format!("{:12.6}", traj.channels.xgamma_norm.last().unwrap()));
        }
        println!("{n:5} {at_zero:12.6} {row}");
    }
}
