use super::{Container, GeometryError, ReferenceCurve};

/// Tubular-neighborhood data of a reference curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeData {
    /// Tube half-width.
    pub a: f64,
    /// Radius of the uniform interior/exterior ball condition, capped by the
    /// clearance to the container wall.
    pub r_ball: f64,
    pub kappa_max: f64,
}

/// Safety factor between the admissible bound and the tube width actually used.
pub const TUBE_SAFETY: f64 = 0.9;

/// Largest interior and exterior tangent-ball radii over the nodes.
///
/// For the interior ball at `p` with center `p - rν`, a node `q` enters the
/// ball once `r > |q-p|² / (2 (p-q)·ν)`; the exterior ball is symmetric.
/// Local curvature caps both from the respective side.
fn rolling_ball_radii(curve: &ReferenceCurve) -> (f64, f64) {
    let pts = curve.points();
    let nus = curve.normals();
    let kap = curve.curvature();
    let mut inner = f64::INFINITY;
    let mut outer = f64::INFINITY;
    for i in 0..pts.len() {
        let p = pts[i];
        let nu = nus[i];
        if kap[i] > 0.0 {
            inner = inner.min(1.0 / kap[i]);
        } else if kap[i] < 0.0 {
            outer = outer.min(-1.0 / kap[i]);
        }
        for (j, q) in pts.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = q - p;
            let along = d.dot(&nu);
            let dist2 = d.norm_squared();
            if along < 0.0 {
                inner = inner.min(dist2 / (-2.0 * along));
            } else if along > 0.0 {
                outer = outer.min(dist2 / (2.0 * along));
            }
        }
    }
    (inner, outer)
}

pub fn tube_and_ball(curve: &ReferenceCurve, container: &Container) -> Result<TubeData, GeometryError> {
    let kappa_max = curve.kappa_max();
    if !kappa_max.is_finite() || kappa_max > 1e8 {
        return Err(GeometryError::DegenerateCurve(format!("curvature bound {kappa_max:e}")));
    }
    let (inner, outer) = rolling_ball_radii(curve);
    let clearance = curve
        .points()
        .iter()
        .map(|p| container.clearance(p))
        .fold(f64::INFINITY, f64::min);
    let r_ball = inner.min(outer).min(clearance);
    if !(r_ball > 0.0) {
        return Err(GeometryError::DegenerateCurve(format!("ball radius {r_ball:e}")));
    }
    let curvature_bound = if kappa_max > 0.0 { 1.0 / kappa_max } else { f64::INFINITY };
    let a = TUBE_SAFETY * curvature_bound.min(r_ball);
    Ok(TubeData { a, r_ball, kappa_max })
}
