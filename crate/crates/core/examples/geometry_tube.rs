//! Curvature, tube width and nearest-point projection for an ellipse.
use msflow::geometry::{tube_and_ball, Container, CurveSpec, LevelFunction, Point, ReferenceCurve};

fn main() {
    let container = Container::unit();
    let spec = CurveSpec::Ellipse { center: Point::zeros(), semi_axes: (0.5, 0.4) };
    let curve = ReferenceCurve::build(&spec, 128, &container).expect("ellipse fits in the unit disk");
    let tube = tube_and_ball(&curve, &container).expect("tube");

    println!("kappa_max      {:.12}  (a/b^2 = 3.125)", curve.kappa_max());
    println!("perimeter      {:.12}", curve.perimeter());
    println!("area           {:.12}  (pi ab = {:.12})", curve.area(), std::f64::consts::PI * 0.2);
    println!("total kappa    {:.12}", curve.total_curvature());
    println!("ball radius    {:.6}", tube.r_ball);
    println!("tube width a   {:.6}", tube.a);

    let lf = LevelFunction::new(curve.clone(), tube);
    println!("\n{:>8} {:>8} {:>12} {:>12} {:>12}", "x", "y", "distance", "foot.x", "level");
    for x in [Point::new(0.6, 0.1), Point::new(0.3, 0.3), Point::new(0.0, 0.38), Point::new(0.45, -0.05)] {
        match curve.project(&x) {
            Ok(p) => println!(
                "{:8.3} {:8.3} {:12.8} {:12.8} {:12.8}",
                x.x,
                x.y,
                p.distance,
                p.foot.x,
                lf.eval(&x).unwrap_or(f64::NAN)
            ),
            Err(e) => println!("{:8.3} {:8.3}  {e}", x.x, x.y),
        }
    }
}
