use nalgebra::Matrix2;

use super::{Point, ReferenceCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleOrder {
    /// Plain Hausdorff distance between the node sets.
    Position,
    /// Hausdorff distance between lifted points `(p, ν, κ τ⊗τ)`.
    SecondNormal,
}

struct Lifted {
    p: Point,
    nu: Point,
    shape: Matrix2<f64>,
}

fn lift(curve: &ReferenceCurve) -> Vec<Lifted> {
    curve
        .points()
        .iter()
        .zip(curve.normals())
        .zip(curve.curvature())
        .zip(curve.tangents())
        .map(|(((p, nu), k), t)| {
            let tau = t / t.norm();
            Lifted { p: *p, nu: *nu, shape: tau * tau.transpose() * *k }
        })
        .collect()
}

fn pair_distance(a: &Lifted, b: &Lifted, order: BundleOrder) -> f64 {
    let dp = (a.p - b.p).norm();
    match order {
        BundleOrder::Position => dp,
        BundleOrder::SecondNormal => dp.max((a.nu - b.nu).norm()).max((a.shape - b.shape).norm()),
    }
}

fn directed(from: &[Lifted], to: &[Lifted], order: BundleOrder) -> f64 {
    from.iter()
        .map(|a| to.iter().map(|b| pair_distance(a, b, order)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Hausdorff distance between sampled curves, optionally lifted to the
/// second normal bundle with componentwise-max combination.
pub fn bundle_distance(c1: &ReferenceCurve, c2: &ReferenceCurve, order: BundleOrder) -> f64 {
    let l1 = lift(c1);
    let l2 = lift(c2);
    directed(&l1, &l2, order).max(directed(&l2, &l1, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Circle, Container, CurveSpec};

    fn circle(r: f64) -> ReferenceCurve {
        ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(r)), 64, &Container::unit()).unwrap()
    }

    #[test]
    fn concentric_circles() {
        let (a, b) = (circle(0.4), circle(0.5));
        assert!((bundle_distance(&a, &b, BundleOrder::Position) - 0.1).abs() < 1e-14);
        assert!((bundle_distance(&a, &b, BundleOrder::SecondNormal) - 0.5).abs() < 1e-12);
        assert_eq!(bundle_distance(&a, &a, BundleOrder::SecondNormal), 0.0);
    }
}
