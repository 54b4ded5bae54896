use msflow::geometry::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ellipse(n: usize) -> ReferenceCurve {
    ReferenceCurve::build(&CurveSpec::Ellipse { center: Point::zeros(), semi_axes: (0.5, 0.4) }, n, &Container::unit()).unwrap()
}

fn star(c: &[f64], s: &[f64], n: usize) -> ReferenceCurve {
    let spec = CurveSpec::Radial { center: Point::new(0.05, -0.02), cos: c.to_vec(), sin: s.to_vec() };
    ReferenceCurve::build(&spec, n, &Container::unit()).unwrap()
}

#[test]
fn ellipse_curvature_and_tube() {
    let e = ellipse(128);
    assert!((e.kappa_max() - 3.125).abs() < 1e-10);
    let t = tube_and_ball(&e, &Container::unit()).unwrap();
    assert!((t.r_ball - 0.32).abs() < 1e-3, "{}", t.r_ball);
    assert!((t.a - 0.288).abs() < 1e-3);
}

#[test]
fn ellipse_projection_matches_dense_search() {
    let e = ellipse(128);
    let x = Point::new(0.6, 0.1);
    let proj = e.project(&x).unwrap();
    // Dense grid, then bisection on the stationarity condition (z − x)·z' = 0.
    let f = |t: f64| (Point::new(0.5 * t.cos(), 0.4 * t.sin()) - x).norm_squared();
    let df = |t: f64| (Point::new(0.5 * t.cos(), 0.4 * t.sin()) - x).dot(&Point::new(-0.5 * t.sin(), 0.4 * t.cos()));
    let m = 200_000;
    let best = (0..m).map(|i| i as f64 * std::f64::consts::TAU / m as f64).min_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
    let (mut lo, mut hi) = (best - 1e-4, best + 1e-4);
    assert!(df(lo) < 0.0 && df(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if df(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let foot = Point::new(0.5 * t.cos(), 0.4 * t.sin());
    assert!((proj.foot - foot).norm() < 1e-10);
    assert!((proj.distance - f(t).sqrt()).abs() < 1e-10);
}

#[test]
fn projection_round_trip_in_tube() {
    let curve = star(&[0.4, 0.0, 0.03, 0.01], &[0.0, 0.02, 0.0, 0.0], 128);
    let tube = tube_and_ball(&curve, &Container::unit()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let d = rng.random_range(-0.95..0.95) * tube.a;
        let x = curve.lift(theta, d);
        let p = curve.project(&x).unwrap();
        assert!((p.foot + p.normal * p.distance - x).norm() < 1e-9);
        assert!((p.distance - d).abs() < 1e-9);
    }
}

#[test]
fn level_function_gradient_is_the_normal() {
    let curve = ellipse(128);
    let tube = tube_and_ball(&curve, &Container::unit()).unwrap();
    let lf = LevelFunction::new(curve.clone(), tube);
    let h = 1e-5;
    for (p, nu) in curve.points().iter().zip(curve.normals()) {
        assert!(lf.eval(p).unwrap().abs() < 1e-12);
        let dx = Point::new(h, 0.0);
        let dy = Point::new(0.0, h);
        let grad = Point::new(
            (lf.eval(&(p + dx)).unwrap() - lf.eval(&(p - dx)).unwrap()) / (2.0 * h),
            (lf.eval(&(p + dy)).unwrap() - lf.eval(&(p - dy)).unwrap()) / (2.0 * h),
        );
        assert!((grad - nu).norm() < 1e-6);
    }
}

#[test]
fn curve_io_round_trip() {
    let curve = star(&[0.4, 0.0, 0.03], &[0.0, 0.02, 0.0], 64);
    let text = io::write_curve(&curve, &Container::unit());
    let (back, container) = io::read_curve(&text).unwrap();
    assert_eq!(container.radius(), 1.0);
    for (a, b) in curve.points().iter().zip(back.points()) {
        assert!((a - b).norm() < 1e-14);
    }
}

fn coeffs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (0.25..0.45f64, prop::collection::vec(-0.02..0.02f64, 4), prop::collection::vec(-0.02..0.02f64, 4)).prop_map(
        |(r, mut c, s)| {
            c[0] = r;
            (c, s)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn bundle_distance_is_a_metric(a in coeffs(), b in coeffs(), c in coeffs()) {
        let (x, y, z) = (star(&a.0, &a.1, 64), star(&b.0, &b.1, 64), star(&c.0, &c.1, 64));
        for order in [BundleOrder::Position, BundleOrder::SecondNormal] {
            let (dxy, dyx) = (bundle_distance(&x, &y, order), bundle_distance(&y, &x, order));
            prop_assert_eq!(dxy, dyx);
            prop_assert_eq!(bundle_distance(&x, &x, order), 0.0);
            let dxz = bundle_distance(&x, &z, order);
            let dzy = bundle_distance(&z, &y, order);
            prop_assert!(dxy <= dxz + dzy + 1e-12);
        }
    }

    #[test]
    fn total_curvature_is_two_pi(c in coeffs()) {
        let curve = star(&c.0, &c.1, 128);
        prop_assert!((curve.total_curvature() - std::f64::consts::TAU).abs() < 1e-8);
    }

    #[test]
    fn circle_tube_is_analytic(r in 0.1..0.8f64, cx in -0.1..0.1f64) {
        let container = Container::unit();
        let center = Point::new(cx, 0.0);
        prop_assume!(container.clearance(&center) > r + 0.01);
        let curve = ReferenceCurve::build(&CurveSpec::Circle(Circle::new(center, r)), 64, &container).unwrap();
        let t = tube_and_ball(&curve, &container).unwrap();
        let want = r.min(container.clearance(&center) - r);
        prop_assert!((t.r_ball - want).abs() < 1e-10);
        prop_assert!((t.a - 0.9 * want).abs() < 1e-10);
    }
}
