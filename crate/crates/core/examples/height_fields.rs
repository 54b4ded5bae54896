//! Height functions over a reference circle: realize the interface, move the
//! reference, and map the bulk with the Hanzawa extension.
use msflow::geometry::{Circle, Container, CurveSpec, Point, ReferenceCurve};
use msflow::hanzawa::{curvature, hanzawa_extension, realize_interface, reparameterize, HeightField};

fn main() {
    let container = Container::unit();
    let base = ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(0.45)), 64, &container).unwrap();
    let values: Vec<f64> = (0..64).map(|j| {
        let t = base.theta(j);
        0.08 * (2.0 * t).cos() + 0.03 * (3.0 * t).sin()
    }).collect();
    let h = HeightField::new(base, &container, values).unwrap();
    println!("tube width a {:.4}, |rho| {:.4}, slope {:.4}, margin {:.4}", h.tube().a, h.sup_norm(), h.slope(), h.margin());

    let gamma = realize_interface(&h, &container).unwrap();
    let kappa = curvature(&h);
    println!("interface perimeter {:.10}, area {:.10}", gamma.perimeter(), gamma.area());
    println!("curvature range [{:.4}, {:.4}]", kappa.iter().cloned().fold(f64::INFINITY, f64::min), kappa.iter().cloned().fold(0.0, f64::max));

    // The same interface as a graph over a shifted circle.
    let shifted = ReferenceCurve::build(&CurveSpec::Circle(Circle::new(Point::new(0.02, -0.01), 0.46)), 64, &container).unwrap();
    let h2 = reparameterize(&gamma, &shifted, &container).unwrap();
    let back = realize_interface(&h2, &container).unwrap();
    let err = back.points().iter().map(|p| gamma.project(p).unwrap().distance.abs()).fold(0.0, f64::max);
    println!("over the shifted circle: |rho| {:.4}, interface moved by {err:.2e}", h2.sup_norm());

    println!("\nHanzawa extension on a few points:");
    for x in [Point::zeros(), Point::new(0.45, 0.0), Point::new(0.0, 0.5), Point::new(0.8, 0.1)] {
        let y = hanzawa_extension(&h, &x).unwrap();
        println!("  ({:6.3}, {:6.3}) -> ({:8.5}, {:8.5})", x.x, x.y, y.x, y.y);
    }
}
