use nalgebra::{Matrix3, Vector3};

use super::{DynamicsError, Termination, Trajectory};
use crate::geometry::{bundle_distance, BundleOrder, Circle, Container, CurveSpec, Point, ReferenceCurve};
use crate::models::MsState;

/// Least-squares circle through a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumFit {
    pub center: Point,
    pub radius: f64,
    /// Largest nodewise distance from the fitted circle.
    pub residual: f64,
}

impl EquilibriumFit {
    pub fn circle(&self) -> Circle {
        Circle::new(self.center, self.radius)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn inside(&self, container: &Container) -> bool {
        container.clearance(&self.center) > self.radius
    }
}

/// Algebraic (Kasa) fit refined by Gauss-Newton on the geometric residuals.
pub fn fit_equilibrium(curve: &ReferenceCurve) -> EquilibriumFit {
    let pts = curve.points();
    let mut m = Matrix3::<f64>::zeros();
    let mut b = Vector3::<f64>::zeros();
    for p in pts {
        let row = Vector3::new(p.x, p.y, 1.0);
        let rhs = -(p.x * p.x + p.y * p.y);
        m += row * row.transpose();
        b += row * rhs;
    }
    let sol = m.lu().solve(&b).unwrap_or_else(Vector3::zeros);
    let mut c = Point::new(-sol[0] / 2.0, -sol[1] / 2.0);
    let mut r = (c.norm_squared() - sol[2]).max(0.0).sqrt();
    for _ in 0..30 {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for p in pts {
            let d = p - c;
            let dist = d.norm();
            if dist == 0.0 {
                continue;
            }
            let res = dist - r;
            let j = Vector3::new(-d.x / dist, -d.y / dist, -1.0);
            jtj += j * j.transpose();
            jtr += j * res;
        }
        let Some(step) = jtj.lu().solve(&(-jtr)) else { break };
        c += Point::new(step[0], step[1]);
        r += step[2];
        if step.norm() < 1e-15 * r.max(1.0) {
            break;
        }
    }
    let residual = pts.iter().map(|p| ((p - c).norm() - r).abs()).fold(0.0, f64::max);
    EquilibriumFit { center: c, radius: r, residual }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Decay rate `ω̂` in `d(t) ≈ C e^{−ω̂ t}`.
    pub omega: f64,
    /// Coefficient of determination of the log-linear fit.
    pub quality: f64,
    pub converging: bool,
}

/// Least-squares slope of `log d(t)`.
pub fn exponential_rate(series: &[(f64, f64)]) -> Result<RateFit, DynamicsError> {
    if series.len() < 10 {
        return Err(DynamicsError::InsufficientSamples { needed: 10, got: series.len() });
    }
    if series.iter().any(|(t, d)| !(*d > 0.0) || !d.is_finite() || !t.is_finite()) {
        return Err(DynamicsError::NonPositiveSeries);
    }
    let n = series.len() as f64;
    let tm = series.iter().map(|(t, _)| t).sum::<f64>() / n;
    let ym = series.iter().map(|(_, d)| d.ln()).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (t, d) in series {
        let (x, y) = (t - tm, d.ln() - ym);
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let quality = if syy > 1e-28 * n { (sxy * sxy / (sxx * syy)).min(1.0) } else { 1.0 };
    let omega = -slope;
    // A rate that changes `d` by less than one part in 10⁶ over the window is no decay.
    let span = series[series.len() - 1].0 - series[0].0;
    let converging = omega * span > 1e-6;
    Ok(RateFit { omega, quality, converging })
}

/// Trailing part of a decaying series covering its last factor of ten,
/// extended backwards to at least ten samples.
pub fn last_decade(series: &[(f64, f64)]) -> &[(f64, f64)] {
    let Some(&(_, end)) = series.last() else { return series };
    let start = series.iter().rposition(|(_, d)| *d >= 10.0 * end).unwrap_or(0);
    let start = start.min(series.len().saturating_sub(10));
    &series[start..]
}

#[derive(Debug, Clone, PartialEq)]
pub struct LjapunovTrace {
    pub times: Vec<f64>,
    pub perimeter: Vec<f64>,
    /// `Δφ/Δt + ∫|∇u|²` per step, using the dissipation at the step start.
    pub consistency: Vec<f64>,
    /// Steps whose perimeter increased by more than the tolerance.
    pub increases: Vec<usize>,
    pub max_increase: f64,
}

impl LjapunovTrace {
    pub fn monotone(&self) -> bool {
        self.increases.is_empty()
    }

    pub fn max_consistency(&self) -> f64 {
        self.consistency.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Perimeter tolerance per step.
pub const PERIMETER_TOLERANCE: f64 = 1e-8;

pub fn ljapunov_trace(traj: &Trajectory<MsState>) -> LjapunovTrace {
    let phi = &traj.channels.perimeter;
    let diss = &traj.channels.dissipation;
    let mut consistency = Vec::new();
    let mut increases = Vec::new();
    let mut max_increase: f64 = 0.0;
    for i in 1..phi.len() {
        let dt = traj.times[i] - traj.times[i - 1];
        let inc = phi[i] - phi[i - 1];
        max_increase = max_increase.max(inc);
        if inc > PERIMETER_TOLERANCE {
            increases.push(i);
        }
        if dt > 0.0 {
            consistency.push(inc / dt + diss[i - 1]);
        }
    }
    LjapunovTrace { times: traj.times.clone(), perimeter: phi.clone(), consistency, increases, max_increase }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Converged,
    InProgress,
    NonConvergent(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaLimitReport {
    pub limit: EquilibriumFit,
    pub rate: Option<RateFit>,
    /// `bundle_distance` of each recorded interface to the limit circle.
    pub distance: Vec<(f64, f64)>,
    pub verdict: Verdict,
}

/// Below this every distance to the limit counts as zero.
const DISTANCE_FLOOR: f64 = 1e-11;

pub fn omega_limit_report(traj: &Trajectory<MsState>) -> Result<OmegaLimitReport, DynamicsError> {
    let last = traj.states.last().ok_or(DynamicsError::InsufficientSamples { needed: 1, got: 0 })?;
    let gamma = last.interface()?;
    let limit = fit_equilibrium(&gamma);
    let n = gamma.len();
    let circle = ReferenceCurve::build(&CurveSpec::Circle(limit.circle()), n, last.container()).map_err(crate::hanzawa::HanzawaError::from)?;
    let mut distance = Vec::with_capacity(traj.len());
    for (t, s) in traj.times.iter().zip(&traj.states) {
        distance.push((*t, bundle_distance(&s.interface()?, &circle, BundleOrder::SecondNormal)));
    }
    if let Termination::Breakdown { cause, .. } = &traj.termination {
        return Ok(OmegaLimitReport { limit, rate: None, distance, verdict: Verdict::NonConvergent(cause.to_string()) });
    }
    if distance.iter().all(|(_, d)| *d < DISTANCE_FLOOR) {
        return Ok(OmegaLimitReport { limit, rate: None, distance, verdict: Verdict::Converged });
    }
    let positive: Vec<(f64, f64)> = distance.iter().copied().filter(|(_, d)| *d >= DISTANCE_FLOOR).collect();
    let rate = exponential_rate(last_decade(&positive)).ok();
    let residual = traj.channels.residual.last().copied().unwrap_or(f64::INFINITY);
    let verdict = match rate {
        Some(r) if r.converging && r.quality >= 0.9 && residual < 1e-6 => Verdict::Converged,
        _ => Verdict::InProgress,
    };
    Ok(OmegaLimitReport { limit, rate, distance, verdict })
}
