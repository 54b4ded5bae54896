use super::{GeometryError, Point, ReferenceCurve, TubeData};

fn bump_tail(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step on `[0, 1]`, flat to all orders at both ends.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let (a, b) = (bump_tail(u), bump_tail(1.0 - u));
    a / (a + b)
}

const GL_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// `∫₀^v smooth_step` for `v ∈ [0, 1]`: composite 8-point Gauss-Legendre on
/// panels that scale with `v`, so the result stays smooth in `v`.
fn smooth_step_integral(v: f64) -> f64 {
    const PANELS: usize = 16;
    let h = v / PANELS as f64;
    let mut sum = 0.0;
    for p in 0..PANELS {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * (smooth_step(mid - 0.5 * h * x) + smooth_step(mid + 0.5 * h * x));
        }
    }
    0.5 * h * sum
}

/// Fraction of the transition spent in each rounded end.
const ROUNDING: f64 = 0.05;

/// Smooth cutoff: `1` for `|s| <= 1/3`, `0` for `|s| >= 2/3`.
///
/// The transition is a linear ramp with rounded ends, so `|χ'| ≤ 3/(1 − 0.05)`.
/// That keeps `1 + χ'(d/a) ρ/a > 0` for heights up to `0.3 a`, which makes
/// the Hanzawa extension injective.
pub fn cutoff(s: f64) -> f64 {
    let s = s.abs();
    if s <= 1.0 / 3.0 {
        return 1.0;
    }
    if s >= 2.0 / 3.0 {
        return 0.0;
    }
    let t = 3.0 * (s - 1.0 / 3.0);
    let d = ROUNDING;
    // Antiderivative of the slope profile; the total is 1 − d because each
    // rounded end integrates to d/2.
    let total = 1.0 - d;
    let ramp = if t <= d {
        d * smooth_step_integral(t / d)
    } else if t >= 1.0 - d {
        total - d * smooth_step_integral((1.0 - t) / d)
    } else {
        0.5 * d + (t - d)
    };
    1.0 - ramp / total
}

/// Largest slope of [`cutoff`].
pub const CUTOFF_SLOPE_BOUND: f64 = 3.0 / (1.0 - ROUNDING);

/// `φ_Σ = g ∘ d_Σ` with `g(s) = s χ(s/a) + (1 - χ(s/a)) sgn s`.
#[derive(Debug, Clone)]
pub struct LevelFunction {
    curve: ReferenceCurve,
    tube: TubeData,
}

impl LevelFunction {
    pub fn new(curve: ReferenceCurve, tube: TubeData) -> Self {
        Self { curve, tube }
    }

    pub fn profile(&self, s: f64) -> f64 {
        let chi = cutoff(s / self.tube.a);
        let sign = if s > 0.0 {
            1.0
        } else if s < 0.0 {
            -1.0
        } else {
            0.0
        };
        s * chi + (1.0 - chi) * sign
    }

    pub fn eval(&self, x: &Point) -> Result<f64, GeometryError> {
        let proj = self.curve.project(x)?;
        Ok(self.profile(proj.distance))
    }

    pub fn curve(&self) -> &ReferenceCurve {
        &self.curve
    }

    pub fn tube(&self) -> &TubeData {
        &self.tube
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{tube_and_ball, Circle, Container, CurveSpec};

    fn lf() -> LevelFunction {
        let c = ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(0.4)), 64, &Container::unit()).unwrap();
        let t = tube_and_ball(&c, &Container::unit()).unwrap();
        LevelFunction::new(c, t)
    }

    #[test]
    fn cutoff_plateaus() {
        assert_eq!(cutoff(0.2), 1.0);
        assert_eq!(cutoff(-0.3), 1.0);
        assert_eq!(cutoff(0.7), 0.0);
        let mid = cutoff(0.5);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((mid - 0.5).abs() < 1e-14);
    }

    #[test]
    fn cutoff_is_monotone_with_bounded_slope() {
        let m = 20_000;
        let mut prev = 1.0;
        for i in 1..=m {
            let s = 1.0 / 3.0 + i as f64 / (3.0 * m as f64);
            let v = cutoff(s);
            assert!(v <= prev);
            assert!((prev - v) * 3.0 * m as f64 <= CUTOFF_SLOPE_BOUND + 1e-6);
            prev = v;
        }
        assert!(prev.abs() < 1e-12);
        assert!((smooth_step_integral(1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn level_values() {
        let f = lf();
        let a = f.tube().a;
        assert!(f.eval(&Point::new(0.4, 0.0)).unwrap().abs() < 1e-15);
        let v = f.eval(&Point::new(0.4 + 0.1 * a, 0.0)).unwrap();
        assert!((v - 0.1 * a).abs() < 1e-14);
        assert_eq!(f.eval(&Point::new(0.4 + 1.1 * a, 0.0)).unwrap(), 1.0);
        assert_eq!(f.eval(&Point::new(0.0, 0.01)).unwrap(), -1.0);
    }
}
