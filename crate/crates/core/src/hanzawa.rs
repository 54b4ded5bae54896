//! Height-function description of interfaces over a reference curve:
//! `Γ_ρ = { p + ρ(p) ν_Σ(p) }`, its curvature operator with the
//! quasilinear split `K(ρ) = P(ρ)ρ + Q(ρ)`, reparameterization over a new
//! reference curve and the bulk extension `Θ_h`.

use std::fmt::Write as _;

use log::warn;
use thiserror::Error;

use crate::geometry::{
    cutoff, io as curve_io, tube_and_ball, Circle, Container, CurveSpec, GeometryError, Point,
    ReferenceCurve, TubeData,
};
use crate::spectral;

/// Heights must stay within this fraction of the tube half-width.
pub const VALIDITY_MARGIN: f64 = 0.3;
/// Bound on `|dρ/ds|` (arclength slope over the base curve).
pub const SLOPE_BOUND: f64 = 1.0;
/// Relative size of the top-quarter spectrum that triggers a resolution warning.
pub const ALIASING_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HanzawaError {
    #[error("height field leaves the admissible tube: {0}")]
    TubeViolation(String),
    #[error("realized interface is not simple (segments {0} and {1})")]
    SelfIntersection(usize, usize),
    #[error("operation requires a circular reference curve")]
    UnsupportedBase,
    #[error(transparent)]
    Geometry(GeometryError),
}

impl From<GeometryError> for HanzawaError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::SelfIntersection(i, j) => HanzawaError::SelfIntersection(i, j),
            other => HanzawaError::Geometry(other),
        }
    }
}

/// Spectral content above the resolved band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionWarning {
    pub tail_ratio: f64,
}

/// Heights `ρ(θ_j)` over the nodes of a base curve.
#[derive(Debug, Clone)]
pub struct HeightField {
    base: ReferenceCurve,
    tube: TubeData,
    values: Vec<f64>,
}

impl HeightField {
    pub fn new(base: ReferenceCurve, container: &Container, values: Vec<f64>) -> Result<Self, HanzawaError> {
        let tube = tube_and_ball(&base, container)?;
        Self::with_tube(base, tube, values)
    }

    pub fn with_tube(base: ReferenceCurve, tube: TubeData, values: Vec<f64>) -> Result<Self, HanzawaError> {
        let h = Self::unchecked(base, tube, values);
        h.validate()?;
        Ok(h)
    }

    /// Skip the admissibility check; used for intermediate states whose
    /// margins are monitored by the caller.
    pub fn unchecked(base: ReferenceCurve, tube: TubeData, values: Vec<f64>) -> Self {
        assert_eq!(base.len(), values.len(), "height field must match base nodes");
        Self { base, tube, values }
    }

    pub fn zero(base: ReferenceCurve, container: &Container) -> Result<Self, HanzawaError> {
        let n = base.len();
        Self::new(base, container, vec![0.0; n])
    }

    pub fn validate(&self) -> Result<(), HanzawaError> {
        let bound = VALIDITY_MARGIN * self.tube.a;
        let max = self.sup_norm();
        if !(max <= bound) {
            return Err(HanzawaError::TubeViolation(format!("|rho|_inf = {max:.6e} > {bound:.6e}")));
        }
        let slope = self.slope();
        if !(slope <= SLOPE_BOUND) {
            return Err(HanzawaError::TubeViolation(format!("|drho/ds|_inf = {slope:.6e} > {SLOPE_BOUND}")));
        }
        Ok(())
    }

    pub fn base(&self) -> &ReferenceCurve {
        &self.base
    }

    pub fn tube(&self) -> &TubeData {
        &self.tube
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest arclength slope `|ρ_θ| / |p'(θ)|`.
    pub fn slope(&self) -> f64 {
        spectral::differentiate(&self.values, 1)
            .iter()
            .zip(self.base.speed())
            .fold(0.0, |m, (d, s)| m.max(d.abs() / s))
    }

    /// Distance of `|ρ|_∞` to the validity margin; negative once violated.
    pub fn margin(&self) -> f64 {
        VALIDITY_MARGIN * self.tube.a - self.sup_norm()
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        Self::unchecked(self.base.clone(), self.tube, values)
    }

    /// Trigonometric interpolant of the heights.
    pub fn eval(&self, theta: f64) -> f64 {
        spectral::evaluate_real(&spectral::forward_real(&self.values), theta, 0)
    }

    pub fn resolution_warning(&self) -> Option<ResolutionWarning> {
        let tail_ratio = spectral::tail_ratio(&self.values);
        (tail_ratio > ALIASING_THRESHOLD && self.sup_norm() > 0.0).then_some(ResolutionWarning { tail_ratio })
    }
}

fn polar_radius(h: &HeightField, circle: &Circle) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let r: Vec<f64> = h.values.iter().map(|v| circle.radius + v).collect();
    (r, spectral::differentiate(&h.values, 1), spectral::differentiate(&h.values, 2))
}

/// The curve `Γ_ρ`.
pub fn realize_interface(h: &HeightField, container: &Container) -> Result<ReferenceCurve, HanzawaError> {
    let max = h.sup_norm();
    if !(max < h.tube.a) {
        return Err(HanzawaError::TubeViolation(format!("|rho|_inf = {max:.6e} >= a = {:.6e}", h.tube.a)));
    }
    let curve = match h.base.circle() {
        Some(c) => {
            let (r, r1, r2) = polar_radius(h, &c);
            let all_zero = h.values.iter().all(|v| *v == 0.0);
            ReferenceCurve::polar(c.center, &r, &r1, &r2, if all_zero { Some(c) } else { None })
        }
        None => {
            let pts = h
                .base
                .points()
                .iter()
                .zip(h.base.normals())
                .zip(&h.values)
                .map(|((p, nu), v)| p + nu * *v)
                .collect();
            ReferenceCurve::from_samples(pts)
        }
    };
    curve.validate(container)?;
    Ok(curve)
}

/// Curvature of `Γ_ρ` at the nodes, with `κ = 1/R` on circles.
pub fn curvature(h: &HeightField) -> Vec<f64> {
    if let Some(w) = h.resolution_warning() {
        warn!("height field under-resolved: tail ratio {:.3e}", w.tail_ratio);
    }
    match h.base.circle() {
        Some(c) => {
            let (r, r1, r2) = polar_radius(h, &c);
            (0..r.len())
                .map(|j| {
                    let q = r[j] * r[j] + r1[j] * r1[j];
                    (r[j] * r[j] + 2.0 * r1[j] * r1[j] - r[j] * r2[j]) / q.powf(1.5)
                })
                .collect()
        }
        None => {
            let pts = h
                .base
                .points()
                .iter()
                .zip(h.base.normals())
                .zip(&h.values)
                .map(|((p, nu), v)| p + nu * *v)
                .collect();
            ReferenceCurve::from_samples(pts).curvature().to_vec()
        }
    }
}

/// `K(ρ) = -a₂ ρ'' + Q` over a circular base.
#[derive(Debug, Clone)]
pub struct CurvatureSplit {
    pub second_order_coeff: Vec<f64>,
    pub lower_order: Vec<f64>,
}

impl CurvatureSplit {
    /// `P(ρ)σ = -a₂ σ''`.
    pub fn apply_principal(&self, sigma: &[f64]) -> Vec<f64> {
        spectral::differentiate(sigma, 2)
            .iter()
            .zip(&self.second_order_coeff)
            .map(|(d2, a2)| -a2 * d2)
            .collect()
    }
}

pub fn split_curvature(h: &HeightField) -> Result<CurvatureSplit, HanzawaError> {
    let c = h.base.circle().ok_or(HanzawaError::UnsupportedBase)?;
    let (r, r1, _) = polar_radius(h, &c);
    let mut a2 = Vec::with_capacity(r.len());
    let mut q = Vec::with_capacity(r.len());
    for j in 0..r.len() {
        let denom = (r[j] * r[j] + r1[j] * r1[j]).powf(1.5);
        a2.push(r[j] / denom);
        q.push((r[j] * r[j] + 2.0 * r1[j] * r1[j]) / denom);
    }
    Ok(CurvatureSplit { second_order_coeff: a2, lower_order: q })
}

/// Express `gamma` as a height field over `new_base` by intersecting each
/// base normal line with `gamma`.
///
/// Only the hard tube bound `|ρ|_∞ < a` is enforced here; callers that need
/// the validity margin check `HeightField::validate` themselves.
pub fn reparameterize(
    gamma: &ReferenceCurve,
    new_base: &ReferenceCurve,
    container: &Container,
) -> Result<HeightField, HanzawaError> {
    let tube = tube_and_ball(new_base, container)?;
    let mut values = Vec::with_capacity(new_base.len());
    for (p, nu) in new_base.points().iter().zip(new_base.normals()) {
        let proj = gamma.project(p)?;
        let mut tau = proj.theta;
        let mut s = (proj.foot - p).dot(nu);
        let mut converged = false;
        for _ in 0..60 {
            let (z, z1, _) = gamma.eval(tau);
            let res = z - p - nu * s;
            // Jacobian columns: dz/dτ and -ν
            let det = z1.x * (-nu.y) - (-nu.x) * z1.y;
            if det.abs() < 1e-300 {
                break;
            }
            let dtau = (res.x * (-nu.y) - (-nu.x) * res.y) / det;
            let ds = (z1.x * res.y - z1.y * res.x) / det;
            tau -= dtau;
            s -= ds;
            if dtau.abs() < 1e-15 && ds.abs() < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(HanzawaError::TubeViolation(format!(
                "normal line through ({:.4}, {:.4}) does not meet the interface",
                p.x, p.y
            )));
        }
        values.push(s);
    }
    let h = HeightField::unchecked(new_base.clone(), tube, values);
    let max = h.sup_norm();
    if !(max < tube.a) {
        return Err(HanzawaError::TubeViolation(format!("|rho|_inf = {max:.6e} >= a = {:.6e}", tube.a)));
    }
    Ok(h)
}

/// `Θ_h(x) = x + χ(d_Σ(x)/a) ρ(Π(x)) ν_Σ(Π(x))`.
pub fn hanzawa_extension(h: &HeightField, x: &Point) -> Result<Point, HanzawaError> {
    let a = h.tube.a;
    // Every curve point lies within half an arc spacing of a node, so this
    // settles points far from the tube without projecting them.
    let nearest = h.base.points().iter().map(|p| (p - x).norm()).fold(f64::INFINITY, f64::min);
    let half_arc = h.base.speed().iter().fold(0.0, |m: f64, v| m.max(*v)) * std::f64::consts::PI / h.base.len() as f64;
    if nearest - half_arc >= 2.0 * a / 3.0 {
        return Ok(*x);
    }
    let proj = h.base.project(x)?;
    if proj.distance.abs() >= 2.0 * a / 3.0 {
        return Ok(*x);
    }
    let chi = cutoff(proj.distance / a);
    Ok(x + proj.normal * (chi * h.eval(proj.theta)))
}

/// Height-field table with a base-curve header.
pub fn write_height_field(h: &HeightField, container: &Container) -> String {
    let mut out = curve_io::write_curve(&h.base, container).replacen("# msflow curve", "# msflow height field", 1);
    if let Some(c) = h.base.circle() {
        writeln!(out, "base_circle {:?} {:?} {:?}", c.center.x, c.center.y, c.radius).unwrap();
    }
    for (j, v) in h.values.iter().enumerate() {
        writeln!(out, "h {:?} {:?}", h.base.theta(j), v).unwrap();
    }
    out
}

pub fn read_height_field(text: &str) -> Result<(HeightField, Container), HanzawaError> {
    let mut circle = None;
    let mut values = Vec::new();
    let rec = curve_io::parse_record(text.lines().enumerate(), |no, fields| {
        let num = |i: usize| -> Result<f64, GeometryError> {
            fields
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| GeometryError::InvalidSpec(format!("line {}: bad number", no + 1)))
        };
        match fields[0] {
            "base_circle" => {
                circle = Some(Circle::new(Point::new(num(1)?, num(2)?), num(3)?));
                Ok(true)
            }
            "h" => {
                values.push(num(2)?);
                Ok(true)
            }
            _ => Ok(false),
        }
    })?;
    let spec = match circle {
        Some(c) => CurveSpec::Circle(c),
        None => CurveSpec::Coefficients(rec.coeffs),
    };
    let base = ReferenceCurve::build(&spec, rec.n, &rec.container)?;
    if values.len() != base.len() {
        return Err(HanzawaError::Geometry(GeometryError::InvalidSpec(format!(
            "expected {} height rows, found {}",
            base.len(),
            values.len()
        ))));
    }
    Ok((HeightField::new(base, &rec.container, values)?, rec.container))
}
