//! Linearization at circular equilibria: the finite-difference spectrum
//! against the dispersion relation, and the three-dimensional kernel.
use msflow::dynamics::{linearize_at, Stability};
use msflow::elliptic::concentric_jump_eigenvalue;
use msflow::geometry::{Circle, Container, CurveSpec, Point, ReferenceCurve};
use msflow::models::MsState;

fn main() {
    let container = Container::unit();
    let base = ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(0.5)), 64, &container).unwrap();
    let rep = linearize_at(&MsState::circle(base, &container).unwrap(), 1e-5).unwrap();
    println!("{:>3} {:>16} {:>16} {:>10}", "k", "measured", "dispersion", "rel. err");
    for k in 0..=rep.modes {
        let want = if k < 2 { 0.0 } else { -concentric_jump_eigenvalue(k as u32, 0.5, 1.0) * ((k * k) as f64 - 1.0) / 0.25 };
        let got = rep.mode_rate(k);
        let err = if want > 0.0 { format!("{:10.2e}", (got - want).abs() / want) } else { String::new() };
        println!("{k:3} {got:16.6} {want:16.6} {err}");
    }
    println!("kernel dimension {}, leakage {:.2e}, {:?}", rep.kernel_dimension, rep.leakage(), rep.stability);

    let off = ReferenceCurve::build(&CurveSpec::Circle(Circle::new(Point::new(0.2, 0.1), 0.35)), 64, &container).unwrap();
    let rep = linearize_at(&MsState::circle(off, &container).unwrap(), 1e-5).unwrap();
    let stable = rep.stability == Stability::NormallyStable;
    println!("\noff-center circle: kernel dimension {}, normally stable: {stable}", rep.kernel_dimension);
}
