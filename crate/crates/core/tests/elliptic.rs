use msflow::elliptic::*;
use msflow::geometry::{Circle, Container, CurveSpec, Point, ReferenceCurve};
use msflow::spectral::real_modes;
use proptest::prelude::*;

fn circle(r: f64, n: usize) -> ReferenceCurve {
    ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(r)), n, &Container::unit()).unwrap()
}

fn mode(curve: &ReferenceCurve, k: usize) -> Vec<f64> {
    (0..curve.len()).map(|j| (k as f64 * curve.theta(j)).cos()).collect()
}

fn jump_coefficient(n: usize) -> f64 {
    let g = circle(0.5, n);
    let jump = dtn_jump(&Container::unit(), &g, &mode(&g, 2)).unwrap();
    real_modes(&jump)[2].0
}

#[test]
fn concentric_oracle_at_256_nodes() {
    let want = -128.0 / 17.0;
    let start = std::time::Instant::now();
    let got = jump_coefficient(256);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert!((got - want).abs() < 1e-8 * want.abs(), "{got}");
    assert!((concentric_jump_eigenvalue(2, 0.5, 1.0) - want).abs() < 1e-14);
}

#[test]
fn spectral_convergence() {
    let want = -128.0 / 17.0;
    let errors: Vec<f64> = [32, 64, 128, 256].iter().map(|n| (jump_coefficient(*n) - want).abs()).collect();
    for w in errors.windows(2) {
        assert!(w[1] <= (w[0] / 10.0).max(1e-11), "{errors:?}");
    }
}

#[test]
fn dirichlet_energy_of_mode_two() {
    let g = circle(0.5, 128);
    let sol = solve_two_phase(&Container::unit(), &g, &mode(&g, 2)).unwrap();
    let want = 64.0 * std::f64::consts::PI / 17.0;
    assert!((dirichlet_energy(&sol) - want).abs() < 1e-9 * want);
}

#[test]
fn jump_matrix_is_fourier_diagonal_on_circles() {
    let n = 64;
    let g = circle(0.45, n);
    let op = TwoPhaseOperator::new(&Container::unit(), &g).unwrap();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..=n / 4 {
        for phase in [0.0, 0.5 * std::f64::consts::PI] {
            let e: Vec<f64> = (0..n).map(|j| (k as f64 * g.theta(j) - phase).cos()).collect();
            let modes = real_modes(&op.jump(&e).unwrap());
            for (q, (a, b)) in modes.iter().enumerate() {
                let v = a.abs().max(b.abs());
                if q == k {
                    scale = scale.max(v);
                } else {
                    worst = worst.max(v);
                }
            }
        }
    }
    assert!(worst < 1e-8 * scale, "{worst} vs {scale}");
}

#[test]
fn concentric_eigenvalues_are_negative() {
    let n = 64;
    let g = circle(0.5, n);
    let op = TwoPhaseOperator::new(&Container::unit(), &g).unwrap();
    for k in 1..=n / 4 {
        let j = real_modes(&op.jump(&mode(&g, k)).unwrap())[k].0;
        assert!(j < 0.0, "k = {k}");
        let want = concentric_jump_eigenvalue(k as u32, 0.5, 1.0);
        assert!(want < 0.0 && (j - want).abs() < 1e-6 * want.abs(), "k = {k}: {j} vs {want}");
    }
}

#[test]
fn unit_data_has_no_jump() {
    let g = circle(0.3, 64);
    let jump = dtn_jump(&Container::unit(), &g, &vec![1.0; 64]).unwrap();
    assert!(jump.iter().all(|v| v.abs() < 1e-10));
}

fn star() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Point)> {
    (
        0.3..0.5f64,
        prop::collection::vec(-0.03..0.03f64, 5),
        prop::collection::vec(-0.03..0.03f64, 5),
        -0.1..0.1f64,
        -0.1..0.1f64,
    )
        .prop_map(|(r, mut c, s, x, y)| {
            c[0] = r;
            (c, s, Point::new(x, y))
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn compatibility_and_linearity((c, s, center) in star(), data in prop::collection::vec(-1.0..1.0f64, 10)) {
        let spec = CurveSpec::Radial { center, cos: c, sin: s };
        let gamma = ReferenceCurve::build(&spec, 64, &Container::unit()).unwrap();
        let op = TwoPhaseOperator::new(&Container::unit(), &gamma).unwrap();
        let field = |off: usize| -> Vec<f64> {
            (0..64).map(|j| {
                let t = gamma.theta(j);
                (0..5).map(|k| data[off + k] * ((k + 1) as f64 * t + off as f64).cos()).sum()
            }).collect()
        };
        let (g1, g2) = (field(0), field(5));
        let sol = op.solve(&g1).unwrap();
        let norm = g1.iter().fold(0.0, |m: f64, v| m.max(v.abs())).max(1e-300);
        prop_assert!(sol.integrate(sol.jump()).abs() < 1e-9 * norm);
        prop_assert!(dirichlet_energy(&sol) >= 0.0);
        let sum: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a + b).collect();
        let (j1, j2, j12) = (op.jump(&g1).unwrap(), op.jump(&g2).unwrap(), op.jump(&sum).unwrap());
        let scale = j12.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
        for i in 0..64 {
            prop_assert!((j1[i] + j2[i] - j12[i]).abs() < 1e-10 * scale);
        }
    }
}
