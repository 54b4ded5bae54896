use msflow::geometry::{Circle, Container, CurveSpec, Point, ReferenceCurve};
use msflow::hanzawa::*;
use proptest::prelude::*;

fn circle(r: f64, n: usize) -> ReferenceCurve {
    ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(r)), n, &Container::unit()).unwrap()
}

fn heights(base: &ReferenceCurve, modes: &[(usize, f64, f64)]) -> Vec<f64> {
    (0..base.len())
        .map(|j| {
            let t = base.theta(j);
            modes.iter().map(|(k, a, b)| a * (*k as f64 * t).cos() + b * (*k as f64 * t).sin()).sum()
        })
        .collect()
}

fn modes() -> impl Strategy<Value = Vec<(usize, f64, f64)>> {
    prop::collection::vec((1usize..8, -0.012..0.012f64, -0.012..0.012f64), 1..4)
}

#[test]
fn shifted_cosine_perimeter_matches_quadrature() {
    let base = circle(0.4, 128);
    let c = Container::unit();
    let h = HeightField::new(base.clone(), &c, heights(&base, &[(1, 0.05, 0.0)])).unwrap();
    let gamma = realize_interface(&h, &c).unwrap();
    // Composite Simpson on the polar arclength √(r² + r'²).
    let speed = |t: f64| {
        let (r, dr) = (0.4 + 0.05 * t.cos(), -0.05 * t.sin());
        (r * r + dr * dr).sqrt()
    };
    let m = 20_000;
    let hstep = std::f64::consts::TAU / m as f64;
    let mut sum = speed(0.0) + speed(std::f64::consts::TAU);
    for i in 1..m {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * speed(i as f64 * hstep);
    }
    let oracle = sum * hstep / 3.0;
    assert!((gamma.perimeter() - oracle).abs() < 1e-10);
}

#[test]
fn extension_is_injective_on_a_grid() {
    let base = circle(0.45, 64);
    let c = Container::unit();
    let h = HeightField::new(base.clone(), &c, heights(&base, &[(2, 0.08, 0.0), (3, 0.0, 0.03)])).unwrap();
    let m = 100;
    let xs: Vec<f64> = (0..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect();
    let mapped: Vec<Vec<Point>> =
        xs.iter().map(|y| xs.iter().map(|x| hanzawa_extension(&h, &Point::new(*x, *y)).unwrap()).collect()).collect();
    // Every cell keeps its orientation, so no two cells fold onto each other.
    let cross = |a: Point, b: Point, c: Point| (b - a).perp(&(c - a));
    for i in 0..m {
        for j in 0..m {
            let (p00, p10, p01, p11) = (mapped[i][j], mapped[i][j + 1], mapped[i + 1][j], mapped[i + 1][j + 1]);
            assert!(cross(p00, p10, p11) > 0.0 && cross(p00, p11, p01) > 0.0, "cell ({i}, {j}) folds");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn reparameterization_round_trip(m in modes()) {
        let base = circle(0.45, 64);
        let c = Container::unit();
        let h = HeightField::new(base.clone(), &c, heights(&base, &m)).unwrap();
        let gamma = realize_interface(&h, &c).unwrap();
        let back = reparameterize(&gamma, &base, &c).unwrap();
        for (x, y) in back.values().iter().zip(h.values()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn interfaces_satisfy_gauss_bonnet(m in modes()) {
        let base = circle(0.45, 128);
        let c = Container::unit();
        let h = HeightField::new(base.clone(), &c, heights(&base, &m)).unwrap();
        let gamma = realize_interface(&h, &c).unwrap();
        prop_assert!((gamma.total_curvature() - std::f64::consts::TAU).abs() < 1e-8);
    }

    #[test]
    fn split_is_consistent(m in modes()) {
        let base = circle(0.45, 64);
        let c = Container::unit();
        let h = HeightField::new(base.clone(), &c, heights(&base, &m)).unwrap();
        let split = split_curvature(&h).unwrap();
        prop_assert!(split.second_order_coeff.iter().all(|a| *a > 0.0));
        let k = curvature(&h);
        let p = split.apply_principal(h.values());
        for j in 0..h.len() {
            prop_assert!((p[j] + split.lower_order[j] - k[j]).abs() < 1e-10 * k[j].abs().max(1.0));
        }
    }
}
