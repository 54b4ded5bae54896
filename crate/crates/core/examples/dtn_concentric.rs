//! Two-phase Dirichlet-to-Neumann jump on concentric circles: the cos 2θ
//! coefficient against the closed form -128/17, under node doubling.
use msflow::elliptic::{concentric_jump_eigenvalue, dirichlet_energy, dtn_jump, solve_two_phase};
use msflow::geometry::{Circle, Container, CurveSpec, ReferenceCurve};
use msflow::spectral::real_modes;

fn main() {
    let container = Container::unit();
    let exact = concentric_jump_eigenvalue(2, 0.5, 1.0);
    println!("closed form j_2 = {exact:.15}");
    println!("{:>5} {:>20} {:>12}", "N", "j_2", "rel. error");
    for n in [32, 64, 128, 256] {
        let curve = ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(0.5)), n, &container).unwrap();
        let g: Vec<f64> = (0..n).map(|j| (2.0 * curve.theta(j)).cos()).collect();
        let start = std::time::Instant::now();
        let jump = dtn_jump(&container, &curve, &g).unwrap();
        let j2 = real_modes(&jump)[2].0;
        println!("{n:5} {j2:20.15} {:12.3e}   ({:.0?})", (j2 - exact).abs() / exact.abs(), start.elapsed());
    }

    let curve = ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(0.5)), 128, &container).unwrap();
    let g: Vec<f64> = (0..128).map(|j| (2.0 * curve.theta(j)).cos()).collect();
    let e = dirichlet_energy(&solve_two_phase(&container, &curve, &g).unwrap());
    println!("\nDirichlet energy {e:.12}  (64 pi / 17 = {:.12})", 64.0 * std::f64::consts::PI / 17.0);

    println!("\n{:>3} {:>16}", "k", "j_k");
    for k in 1..=8 {
        println!("{k:3} {:16.10}", concentric_jump_eigenvalue(k, 0.5, 1.0));
    }
}
