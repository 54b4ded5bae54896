use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::{Circle, Container, GeometryError, Point};
use crate::spectral;

/// How to construct a reference curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    Circle(Circle),
    Ellipse { center: Point, semi_axes: (f64, f64) },
    /// Star-shaped curve `r(θ) = cos[0] + Σ_{k≥1} cos[k] cos kθ + sin[k] sin kθ`
    /// around `center`.
    Radial { center: Point, cos: Vec<f64>, sin: Vec<f64> },
    /// Complex Fourier coefficients `(k, c_k)` of `z(θ) = x + iy = Σ c_k e^{ikθ}`.
    Coefficients(Vec<(i64, Complex64)>),
}

/// Nearest-point data for a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Signed distance, negative inside the curve.
    pub distance: f64,
    pub foot: Point,
    pub theta: f64,
    pub normal: Point,
}

impl Projection {
    pub fn within(&self, tube: &super::TubeData) -> bool {
        self.distance.abs() < tube.a
    }
}

/// Smooth closed curve sampled at `N` uniform parameter nodes, with cached
/// outward normals, signed curvature and speed `|z'(θ)|`.
///
/// Curves are always oriented counter-clockwise so that the normal
/// `(y', -x')/|z'|` points out of the enclosed region and circles have
/// curvature `+1/R`.
#[derive(Debug, Clone)]
pub struct ReferenceCurve {
    coeffs: Vec<Complex64>,
    points: Vec<Point>,
    d1: Vec<Point>,
    d2: Vec<Point>,
    normals: Vec<Point>,
    curvature: Vec<f64>,
    speed: Vec<f64>,
    circle: Option<Circle>,
}

fn to_complex(p: &Point) -> Complex64 {
    Complex64::new(p.x, p.y)
}

fn to_point(z: Complex64) -> Point {
    Point::new(z.re, z.im)
}

fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

impl ReferenceCurve {
    /// Build and validate a curve with `n` nodes inside `container`.
    pub fn build(spec: &CurveSpec, n: usize, container: &Container) -> Result<Self, GeometryError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(GeometryError::InvalidSpec(format!(
                "node count must be a power of two >= 8, got {n}"
            )));
        }
        let curve = match spec {
            CurveSpec::Circle(c) => {
                if !(c.radius > 0.0) {
                    return Err(GeometryError::InvalidSpec("circle radius must be positive".into()));
                }
                let r = vec![c.radius; n];
                let zero = vec![0.0; n];
                Self::polar(c.center, &r, &zero, &zero, Some(*c))
            }
            CurveSpec::Ellipse { center, semi_axes: (a, b) } => {
                if !(*a > 0.0 && *b > 0.0) {
                    return Err(GeometryError::InvalidSpec("ellipse semi-axes must be positive".into()));
                }
                let th = spectral::nodes(n);
                let points = th.iter().map(|t| center + Point::new(a * t.cos(), b * t.sin())).collect();
                let d1 = th.iter().map(|t| Point::new(-a * t.sin(), b * t.cos())).collect();
                let d2 = th.iter().map(|t| Point::new(-a * t.cos(), -b * t.sin())).collect();
                Self::from_parts(points, d1, d2, None)
            }
            CurveSpec::Radial { center, cos, sin } => {
                if cos.is_empty() {
                    return Err(GeometryError::InvalidSpec("radial spec needs a mode-0 radius".into()));
                }
                let th = spectral::nodes(n);
                let mut r = vec![cos[0]; n];
                let mut r1 = vec![0.0; n];
                let mut r2 = vec![0.0; n];
                let modes = cos.len().max(sin.len());
                for k in 1..modes {
                    let a = cos.get(k).copied().unwrap_or(0.0);
                    let b = sin.get(k).copied().unwrap_or(0.0);
                    let kf = k as f64;
                    for (j, t) in th.iter().enumerate() {
                        let (s, c) = (kf * t).sin_cos();
                        r[j] += a * c + b * s;
                        r1[j] += kf * (-a * s + b * c);
                        r2[j] += -kf * kf * (a * c + b * s);
                    }
                }
                if r.iter().any(|&x| x <= 0.0) {
                    return Err(GeometryError::InvalidSpec("radial function must stay positive".into()));
                }
                let circle = if modes <= 1 { Some(Circle::new(*center, cos[0])) } else { None };
                Self::polar(*center, &r, &r1, &r2, circle)
            }
            CurveSpec::Coefficients(list) => {
                let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
                for &(k, c) in list {
                    let half = (n / 2) as i64;
                    if k <= -half || k > half {
                        return Err(GeometryError::InvalidSpec(format!(
                            "mode {k} not representable with {n} nodes"
                        )));
                    }
                    let idx = if k >= 0 { k as usize } else { (n as i64 + k) as usize };
                    coeffs[idx] += c;
                }
                Self::from_coefficients(coeffs)
            }
        };
        let curve = if curve.signed_area() < 0.0 { curve.reversed() } else { curve };
        curve.validate(container)?;
        Ok(curve)
    }

    /// Star-shaped curve `center + r(θ)(cos θ, sin θ)` with given radial
    /// samples and their first two derivatives.
    pub fn polar(center: Point, r: &[f64], r1: &[f64], r2: &[f64], circle: Option<Circle>) -> Self {
        let th = spectral::nodes(r.len());
        let mut points = Vec::with_capacity(r.len());
        let mut d1 = Vec::with_capacity(r.len());
        let mut d2 = Vec::with_capacity(r.len());
        for (j, t) in th.iter().enumerate() {
            let (s, c) = t.sin_cos();
            let er = Point::new(c, s);
            let et = Point::new(-s, c);
            points.push(center + er * r[j]);
            d1.push(er * r1[j] + et * r[j]);
            d2.push(er * (r2[j] - r[j]) + et * (2.0 * r1[j]));
        }
        Self::from_parts(points, d1, d2, circle)
    }

    /// Curve through the given nodes with spectrally computed derivatives.
    pub fn from_samples(points: Vec<Point>) -> Self {
        let z: Vec<Complex64> = points.iter().map(to_complex).collect();
        let d1 = spectral::differentiate_complex(&z, 1).into_iter().map(to_point).collect();
        let d2 = spectral::differentiate_complex(&z, 2).into_iter().map(to_point).collect();
        Self::from_parts(points, d1, d2, None)
    }

    pub fn from_coefficients(coeffs: Vec<Complex64>) -> Self {
        let z = spectral::inverse(&coeffs);
        Self::from_samples(z.into_iter().map(to_point).collect())
    }

    fn from_parts(points: Vec<Point>, d1: Vec<Point>, d2: Vec<Point>, circle: Option<Circle>) -> Self {
        let z: Vec<Complex64> = points.iter().map(to_complex).collect();
        let coeffs = spectral::forward(&z);
        let speed: Vec<f64> = d1.iter().map(|v| v.norm()).collect();
        let normals = d1.iter().zip(&speed).map(|(v, s)| Point::new(v.y, -v.x) / *s).collect();
        let curvature = d1
            .iter()
            .zip(&d2)
            .zip(&speed)
            .map(|((a, b), s)| cross(a, b) / (s * s * s))
            .collect();
        Self { coeffs, points, d1, d2, normals, curvature, speed, circle }
    }

    /// Same geometric curve traversed the other way (`θ -> -θ`).
    fn reversed(&self) -> Self {
        let n = self.len();
        let idx = |j: usize| (n - j) % n;
        let points = (0..n).map(|j| self.points[idx(j)]).collect();
        let d1 = (0..n).map(|j| -self.d1[idx(j)]).collect();
        let d2 = (0..n).map(|j| self.d2[idx(j)]).collect();
        Self::from_parts(points, d1, d2, self.circle)
    }

    pub fn validate(&self, container: &Container) -> Result<(), GeometryError> {
        if self.speed.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(GeometryError::DegenerateCurve("vanishing parametric speed".into()));
        }
        self.check_simple()?;
        let max_radius = self.points.iter().map(|p| (p - container.center()).norm()).fold(0.0, f64::max);
        if max_radius >= container.radius() {
            return Err(GeometryError::OutsideContainer { max_radius, container_radius: container.radius() });
        }
        Ok(())
    }

    /// Segment-intersection test on the node polygon.
    pub fn check_simple(&self) -> Result<(), GeometryError> {
        let n = self.len();
        let seg = |i: usize| (self.points[i], self.points[(i + 1) % n]);
        for i in 0..n {
            let (a, b) = seg(i);
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = seg(j);
                if segments_cross(&a, &b, &c, &d) {
                    return Err(GeometryError::SelfIntersection(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.len() as f64
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn tangents(&self) -> &[Point] {
        &self.d1
    }

    pub fn second_derivatives(&self) -> &[Point] {
        &self.d2
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn speed(&self) -> &[f64] {
        &self.speed
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The circle this curve was built from, if any.
    pub fn circle(&self) -> Option<Circle> {
        self.circle
    }

    pub fn kappa_max(&self) -> f64 {
        self.curvature.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    pub fn perimeter(&self) -> f64 {
        let h = 2.0 * PI / self.len() as f64;
        self.speed.iter().sum::<f64>() * h
    }

    /// Signed enclosed area (positive for counter-clockwise curves).
    pub fn signed_area(&self) -> f64 {
        let h = 2.0 * PI / self.len() as f64;
        0.5 * h * self.points.iter().zip(&self.d1).map(|(p, v)| cross(p, v)).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// `∮ κ ds`, equal to `2π` for simple closed curves.
    pub fn total_curvature(&self) -> f64 {
        let h = 2.0 * PI / self.len() as f64;
        self.curvature.iter().zip(&self.speed).map(|(k, s)| k * s).sum::<f64>() * h
    }

    /// Position and first two parametric derivatives at an arbitrary parameter.
    pub fn eval(&self, theta: f64) -> (Point, Point, Point) {
        (
            to_point(spectral::evaluate(&self.coeffs, theta, 0)),
            to_point(spectral::evaluate(&self.coeffs, theta, 1)),
            to_point(spectral::evaluate(&self.coeffs, theta, 2)),
        )
    }

    pub fn normal_at(&self, theta: f64) -> Point {
        let (_, d1, _) = self.eval(theta);
        Point::new(d1.y, -d1.x) / d1.norm()
    }

    /// Nearest point on the curve: Newton iteration on the parameter started
    /// from the closest node.
    pub fn project(&self, x: &Point) -> Result<Projection, GeometryError> {
        let n = self.len();
        let (j0, _) = self
            .points
            .iter()
            .enumerate()
            .map(|(j, p)| (j, (p - x).norm_squared()))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let max_step = 2.0 * PI / n as f64;
        let mut theta = self.theta(j0);
        let mut converged = false;
        for _ in 0..80 {
            let (z, z1, z2) = self.eval(theta);
            let r = z - x;
            let g = r.dot(&z1);
            let mut h = z1.norm_squared() + r.dot(&z2);
            if h <= 0.0 {
                h = z1.norm_squared();
            }
            let step = (-g / h).clamp(-max_step, max_step);
            theta += step;
            if step.abs() < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(GeometryError::NotConverged { x: x.x, y: x.y });
        }
        let theta = theta.rem_euclid(2.0 * PI);
        let (foot, d1, _) = self.eval(theta);
        let normal = Point::new(d1.y, -d1.x) / d1.norm();
        let diff = x - foot;
        let distance = diff.norm().copysign(diff.dot(&normal));
        Ok(Projection { distance, foot, theta, normal })
    }

    /// `Λ(θ, d) = p(θ) + d ν(θ)`.
    pub fn lift(&self, theta: f64, distance: f64) -> Point {
        let (p, _, _) = self.eval(theta);
        p + self.normal_at(theta) * distance
    }

    /// Resample the trigonometric interpolant on `n` nodes.
    pub fn resample(&self, n: usize) -> Self {
        if n == self.len() {
            return self.clone();
        }
        let th = spectral::nodes(n);
        let mut points = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for t in th {
            let (p, a, b) = self.eval(t);
            points.push(p);
            d1.push(a);
            d2.push(b);
        }
        Self::from_parts(points, d1, d2, self.circle)
    }
}

fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    cross(&(b - a), &(c - a))
}

fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    (o1 * o2 < 0.0) && (o3 * o4 < 0.0)
}
