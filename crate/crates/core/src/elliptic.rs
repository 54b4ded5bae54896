//! Two-phase harmonic interface problem and its Dirichlet-to-Neumann jump.
//!
//! Given Dirichlet data `g` on a closed interface Γ inside a disk container,
//! `u¹` is harmonic inside Γ, `u²` is harmonic between Γ and the wall with a
//! homogeneous Neumann condition there, and both equal `g` on Γ. The jump
//! `[[∂_ν u]] = ∂_ν u² − ∂_ν u¹` uses the outward normal of the inner phase.
//!
//! Discretization: direct boundary integral equations with the kernel
//! `−(1/2π) log(|x−y|/L)`, `L = 4 R_Ω`, Kress product quadrature for the log
//! singularity on Γ and the periodic trapezoid rule everywhere else.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{Container, GeometryError, Point, ReferenceCurve};
use crate::spectral::tail_ratio;

/// Spectral tail ratio of `g` above which the data count as under-resolved.
pub const RESOLUTION_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum EllipticError {
    #[error("ill-conditioned configuration: {0}")]
    IllConditioned(String),
    #[error("data length {got} does not match {expected} interface nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Wall discretization of the container circle.
#[derive(Debug, Clone)]
struct Wall {
    points: Vec<Point>,
    normals: Vec<Point>,
    speed: f64,
}

impl Wall {
    fn new(container: &Container, m: usize) -> Self {
        let r = container.radius();
        let c = container.center();
        let mut points = Vec::with_capacity(m);
        let mut normals = Vec::with_capacity(m);
        for j in 0..m {
            let t = 2.0 * PI * j as f64 / m as f64;
            let n = Point::new(t.cos(), t.sin());
            points.push(c + n * r);
            normals.push(n);
        }
        Self { points, normals, speed: r }
    }

    fn len(&self) -> usize {
        self.points.len()
    }
}

fn log_kernel(x: &Point, y: &Point, log_l: f64) -> f64 {
    -((x - y).norm().ln() - log_l) / (2.0 * PI)
}

/// `∂_{n_y}` of the log kernel.
fn dipole_kernel(x: &Point, y: &Point, n_y: &Point) -> f64 {
    let d = y - x;
    -d.dot(n_y) / (2.0 * PI * d.norm_squared())
}

/// Kress weights `R_m` for `∫ log(4 sin²((t_i−t)/2)) f(t) dt`, indexed by `m = i − j mod N`.
fn kress_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    (0..n)
        .map(|m| {
            let t = 2.0 * PI * m as f64 / n as f64;
            let mut s = 0.0;
            for k in 1..half {
                s += (k as f64 * t).cos() / k as f64;
            }
            -4.0 * PI / n as f64 * s - 4.0 * PI / (n * n) as f64 * (half as f64 * t).cos()
        })
        .collect()
}

fn single_layer(curve: &ReferenceCurve, log_l: f64) -> DMatrix<f64> {
    let n = curve.len();
    let w = kress_weights(n);
    let h = 2.0 * PI / n as f64;
    let pts = curve.points();
    let speed = curve.speed();
    DMatrix::from_fn(n, n, |i, j| {
        let ell = if i == j {
            speed[i].ln()
        } else {
            let half_gap = (PI * (i as f64 - j as f64) / n as f64).sin().abs();
            ((pts[i] - pts[j]).norm() / (2.0 * half_gap)).ln()
        };
        let r = w[(i + n - j) % n];
        speed[j] * (-(0.5 * r + h * ell) / (2.0 * PI) + log_l / n as f64)
    })
}

fn double_layer(curve: &ReferenceCurve) -> DMatrix<f64> {
    let n = curve.len();
    let h = 2.0 * PI / n as f64;
    let pts = curve.points();
    let nus = curve.normals();
    let speed = curve.speed();
    let kap = curve.curvature();
    DMatrix::from_fn(n, n, |i, j| {
        let k = if i == j { -kap[i] / (4.0 * PI) } else { dipole_kernel(&pts[i], &pts[j], &nus[j]) };
        k * speed[j] * h
    })
}

/// Reject configurations where the trapezoid rule cannot resolve the
/// near-singular interactions: Γ within two node spacings of the wall or of
/// a distant part of itself.
fn check_conditioning(curve: &ReferenceCurve, container: &Container, wall: &Wall) -> Result<(), EllipticError> {
    let n = curve.len();
    let h = 2.0 * PI / n as f64;
    let pts = curve.points();
    let spacing: Vec<f64> = curve.speed().iter().map(|s| s * h).collect();
    let hmax = spacing.iter().cloned().fold(0.0, f64::max);
    let wall_spacing = 2.0 * PI * wall.speed / wall.len() as f64;
    let gap = pts.iter().map(|p| container.clearance(p)).fold(f64::INFINITY, f64::min);
    if gap < 2.0 * hmax.max(wall_spacing) {
        return Err(EllipticError::IllConditioned(format!(
            "interface-wall gap {gap:.3e} below two node spacings ({:.3e})",
            hmax.max(wall_spacing)
        )));
    }
    let mut arc = vec![0.0; n + 1];
    for j in 0..n {
        arc[j + 1] = arc[j] + spacing[j];
    }
    let total = arc[n];
    for i in 0..n {
        for j in i + 1..n {
            let along = (arc[j] - arc[i]).min(total - arc[j] + arc[i]);
            let d = (pts[i] - pts[j]).norm();
            if along > 4.0 * hmax && d < 2.0 * hmax {
                return Err(EllipticError::IllConditioned(format!(
                    "interface nodes {i} and {j} are {d:.3e} apart across the curve"
                )));
            }
        }
    }
    Ok(())
}

/// Factorized discrete solution operator for a fixed interface.
///
/// Each Dirichlet datum `g` maps linearly to the one-sided fluxes and the wall
/// trace; the maps are stored as dense matrices.
#[derive(Debug, Clone)]
pub struct TwoPhaseOperator {
    interface: ReferenceCurve,
    container: Container,
    wall: Wall,
    /// `g ↦ ∂_ν u¹`.
    inner: DMatrix<f64>,
    /// `g ↦ ∂_ν u²`.
    outer: DMatrix<f64>,
    /// `g ↦ u|_wall`.
    wall_trace: DMatrix<f64>,
    jump: DMatrix<f64>,
}

impl TwoPhaseOperator {
    pub fn new(container: &Container, interface: &ReferenceCurve) -> Result<Self, EllipticError> {
        let n = interface.len();
        interface.validate(container)?;
        let wall = Wall::new(container, n);
        check_conditioning(interface, container, &wall)?;
        let m = wall.len();
        let log_l = (4.0 * container.radius()).ln();
        let hw = 2.0 * PI / m as f64;

        let s = single_layer(interface, log_l);
        let k = double_layer(interface);
        let half = DMatrix::<f64>::identity(n, n) * 0.5;

        let inner = s
            .clone()
            .lu()
            .solve(&(&half + &k))
            .ok_or_else(|| EllipticError::IllConditioned("singular interior single layer".into()))?;

        let gp = interface.points();
        let gn = interface.normals();
        let gs = interface.speed();
        let hg = 2.0 * PI / n as f64;
        // Unknowns: [∂_ν u² on Γ (n); u on wall (m)].
        let mut sys = DMatrix::<f64>::zeros(n + m, n + m);
        let mut rhs = DMatrix::<f64>::zeros(n + m, n);
        for i in 0..n {
            for j in 0..n {
                sys[(i, j)] = -s[(i, j)];
                rhs[(i, j)] = half[(i, j)] - k[(i, j)];
            }
            for j in 0..m {
                sys[(i, n + j)] = -dipole_kernel(&gp[i], &wall.points[j], &wall.normals[j]) * wall.speed * hw;
            }
        }
        for i in 0..m {
            let x = wall.points[i];
            for j in 0..n {
                sys[(n + i, j)] = -log_kernel(&x, &gp[j], log_l) * gs[j] * hg;
                rhs[(n + i, j)] = -dipole_kernel(&x, &gp[j], &gn[j]) * gs[j] * hg;
            }
            for j in 0..m {
                let kww = if i == j {
                    -1.0 / (4.0 * PI * wall.speed)
                } else {
                    dipole_kernel(&x, &wall.points[j], &wall.normals[j])
                };
                sys[(n + i, n + j)] = -kww * wall.speed * hw;
            }
            sys[(n + i, n + i)] -= 0.5;
        }
        let sol = sys
            .lu()
            .solve(&rhs)
            .ok_or_else(|| EllipticError::IllConditioned("singular exterior system".into()))?;
        let outer = sol.rows(0, n).into_owned();
        let wall_trace = sol.rows(n, m).into_owned();
        let jump = &outer - &inner;
        Ok(Self { interface: interface.clone(), container: *container, wall, inner, outer, wall_trace, jump })
    }

    pub fn interface(&self) -> &ReferenceCurve {
        &self.interface
    }

    pub fn container(&self) -> &Container {
        &self.container
    }

    /// Discrete jump operator `g ↦ [[∂_ν u]]` on the interface nodes.
    pub fn jump_matrix(&self) -> &DMatrix<f64> {
        &self.jump
    }

    fn check_len(&self, g: &[f64]) -> Result<(), EllipticError> {
        if g.len() != self.interface.len() {
            return Err(EllipticError::LengthMismatch { expected: self.interface.len(), got: g.len() });
        }
        Ok(())
    }

    pub fn jump(&self, g: &[f64]) -> Result<Vec<f64>, EllipticError> {
        self.check_len(g)?;
        Ok((&self.jump * DVector::from_column_slice(g)).as_slice().to_vec())
    }

    pub fn solve(&self, g: &[f64]) -> Result<TwoPhaseSolution, EllipticError> {
        self.check_len(g)?;
        let ratio = tail_ratio(g);
        if ratio > RESOLUTION_THRESHOLD {
            log::warn!("interface data under-resolved: tail ratio {ratio:.2e}");
        }
        let gv = DVector::from_column_slice(g);
        let inner = (&self.inner * &gv).as_slice().to_vec();
        let outer = (&self.outer * &gv).as_slice().to_vec();
        let wall_trace = (&self.wall_trace * &gv).as_slice().to_vec();
        let jump = outer.iter().zip(&inner).map(|(a, b)| a - b).collect();
        Ok(TwoPhaseSolution {
            interface: self.interface.clone(),
            container: self.container,
            wall: self.wall.clone(),
            g: g.to_vec(),
            inner_flux: inner,
            outer_flux: outer,
            wall_trace,
            jump,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TwoPhaseSolution {
    interface: ReferenceCurve,
    container: Container,
    wall: Wall,
    g: Vec<f64>,
    inner_flux: Vec<f64>,
    outer_flux: Vec<f64>,
    wall_trace: Vec<f64>,
    jump: Vec<f64>,
}

impl TwoPhaseSolution {
    pub fn interface(&self) -> &ReferenceCurve {
        &self.interface
    }

    pub fn container(&self) -> &Container {
        &self.container
    }

    pub fn data(&self) -> &[f64] {
        &self.g
    }

    /// `∂_ν u¹` on Γ.
    pub fn inner_flux(&self) -> &[f64] {
        &self.inner_flux
    }

    /// `∂_ν u²` on Γ.
    pub fn outer_flux(&self) -> &[f64] {
        &self.outer_flux
    }

    pub fn wall_trace(&self) -> &[f64] {
        &self.wall_trace
    }

    pub fn jump(&self) -> &[f64] {
        &self.jump
    }

    /// `∮_Γ f ds` by the trapezoid rule.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let h = 2.0 * PI / self.interface.len() as f64;
        f.iter().zip(self.interface.speed()).map(|(v, s)| v * s).sum::<f64>() * h
    }

    /// Representation formula at a point off Γ. Accurate at distances of a
    /// few node spacings from Γ and the wall.
    pub fn eval(&self, x: &Point) -> Result<f64, EllipticError> {
        if self.container.clearance(x) < 0.0 {
            return Err(EllipticError::Geometry(GeometryError::OutsideContainer {
                max_radius: (x - self.container.center()).norm(),
                container_radius: self.container.radius(),
            }));
        }
        let log_l = (4.0 * self.container.radius()).ln();
        let n = self.interface.len();
        let h = 2.0 * PI / n as f64;
        let pts = self.interface.points();
        let nus = self.interface.normals();
        let speed = self.interface.speed();
        let inside = winding_inside(pts, x);
        let mut u = 0.0;
        for j in 0..n {
            let single = log_kernel(x, &pts[j], log_l) * speed[j] * h;
            let double = dipole_kernel(x, &pts[j], &nus[j]) * speed[j] * h;
            if inside {
                u += single * self.inner_flux[j] - double * self.g[j];
            } else {
                u += -single * self.outer_flux[j] + double * self.g[j];
            }
        }
        if !inside {
            let hw = 2.0 * PI / self.wall.len() as f64;
            for j in 0..self.wall.len() {
                u -= dipole_kernel(x, &self.wall.points[j], &self.wall.normals[j]) * self.wall.speed * hw * self.wall_trace[j];
            }
        }
        Ok(u)
    }

    /// Evaluate at probe points and format as CSV with header `x,y,u`.
    pub fn probe_csv(&self, probes: &[Point]) -> Result<String, EllipticError> {
        let mut out = String::from("x,y,u\n");
        for p in probes {
            let u = self.eval(p)?;
            writeln!(out, "{:?},{:?},{:?}", p.x, p.y, u).unwrap();
        }
        Ok(out)
    }
}

fn winding_inside(poly: &[Point], x: &Point) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > x.y) != (b.y > x.y) {
            let t = (x.y - a.y) / (b.y - a.y);
            if x.x < a.x + t * (b.x - a.x) {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn solve_two_phase(container: &Container, interface: &ReferenceCurve, g: &[f64]) -> Result<TwoPhaseSolution, EllipticError> {
    TwoPhaseOperator::new(container, interface)?.solve(g)
}

pub fn dtn_jump(container: &Container, interface: &ReferenceCurve, g: &[f64]) -> Result<Vec<f64>, EllipticError> {
    TwoPhaseOperator::new(container, interface)?.jump(g)
}

/// `∫_Ω |∇u|²` through the boundary identity `−∮_Γ g [[∂_ν u]] ds`.
pub fn dirichlet_energy(sol: &TwoPhaseSolution) -> f64 {
    let e: Vec<f64> = sol.g.iter().zip(&sol.jump).map(|(g, j)| -g * j).collect();
    sol.integrate(&e).max(0.0)
}

/// Closed-form jump eigenvalue for concentric circles of radii `r < r_wall`.
pub fn concentric_jump_eigenvalue(k: u32, r: f64, r_wall: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as i32;
    let kf = k as f64;
    let w2k = r_wall.powi(2 * k);
    let alpha = 1.0 / (r.powi(k) + w2k * r.powi(-k));
    alpha * kf * (r.powi(k - 1) - w2k * r.powi(-k - 1)) - kf / r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Circle, CurveSpec};

    fn circle(r: f64, n: usize) -> ReferenceCurve {
        ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(r)), n, &Container::unit()).unwrap()
    }

    fn mode(c: &ReferenceCurve, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..c.len()).map(|j| f(c.theta(j))).collect()
    }

    #[test]
    fn closed_form_value() {
        assert!((concentric_jump_eigenvalue(2, 0.5, 1.0) + 128.0 / 17.0).abs() < 1e-13);
    }

    #[test]
    fn constant_data() {
        let c = circle(0.5, 64);
        let sol = solve_two_phase(&Container::unit(), &c, &vec![2.5; 64]).unwrap();
        assert!(sol.jump().iter().all(|j| j.abs() < 1e-11));
        assert!(dirichlet_energy(&sol) < 1e-10);
        assert!((sol.eval(&Point::new(0.1, 0.2)).unwrap() - 2.5).abs() < 1e-11);
        assert!((sol.eval(&Point::new(0.7, -0.1)).unwrap() - 2.5).abs() < 1e-7);
    }

    #[test]
    fn concentric_mode_two() {
        let c = circle(0.5, 128);
        let g = mode(&c, |t| (2.0 * t).cos());
        let sol = solve_two_phase(&Container::unit(), &c, &g).unwrap();
        let want = -128.0 / 17.0;
        for (j, gj) in sol.jump().iter().zip(&g) {
            assert!((j - want * gj).abs() < 1e-9, "{j} vs {}", want * gj);
        }
        assert!((dirichlet_energy(&sol) - 64.0 * PI / 17.0).abs() < 1e-8);
    }

    #[test]
    fn interior_and_exterior_values() {
        let c = circle(0.5, 128);
        let g = mode(&c, |t| (2.0 * t).cos());
        let sol = solve_two_phase(&Container::unit(), &c, &g).unwrap();
        let alpha = 4.0 / 17.0;
        let (r, t) = (0.3_f64, 0.4_f64);
        let inner = (r / 0.5).powi(2) * (2.0 * t).cos();
        assert!((sol.eval(&Point::new(r * t.cos(), r * t.sin())).unwrap() - inner).abs() < 1e-9);
        let r = 0.75_f64;
        let outer = alpha * (r * r + r.powi(-2)) * (2.0 * t).cos();
        assert!((sol.eval(&Point::new(r * t.cos(), r * t.sin())).unwrap() - outer).abs() < 1e-9);
        let wall = alpha * 2.0;
        assert!((sol.wall_trace()[0] - wall).abs() < 1e-9);
    }

    #[test]
    fn rotation_equivariance() {
        let c = circle(0.4, 64);
        let op = TwoPhaseOperator::new(&Container::unit(), &c).unwrap();
        for k in 1..8 {
            let jc = op.jump(&mode(&c, |t| (k as f64 * t).cos())).unwrap();
            let js = op.jump(&mode(&c, |t| (k as f64 * t).sin())).unwrap();
            let nc = jc.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ns = js.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((nc - ns).abs() < 1e-9 * nc);
        }
    }

    #[test]
    fn wall_contact_is_ill_conditioned() {
        let boxed = Container::disk(0.505).unwrap();
        let c = ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(0.5)), 64, &boxed).unwrap();
        assert!(matches!(TwoPhaseOperator::new(&boxed, &c), Err(EllipticError::IllConditioned(_))));
    }

    #[test]
    fn compatibility_on_ellipse() {
        let spec = CurveSpec::Ellipse { center: Point::new(0.1, 0.05), semi_axes: (0.45, 0.3) };
        let c = ReferenceCurve::build(&spec, 128, &Container::unit()).unwrap();
        let g = mode(&c, |t| (3.0 * t).sin() + 0.3 * t.cos() + 1.0);
        let sol = solve_two_phase(&Container::unit(), &c, &g).unwrap();
        let total = sol.integrate(sol.jump());
        assert!(total.abs() < 1e-10, "{total}");
        assert!(dirichlet_energy(&sol) > 0.0);
    }

    #[test]
    fn probe_export() {
        let c = circle(0.5, 32);
        let sol = solve_two_phase(&Container::unit(), &c, &vec![1.0; 32]).unwrap();
        let csv = sol.probe_csv(&[Point::new(0.0, 0.0), Point::new(0.8, 0.0)]).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("x,y,u\n"));
    }
}
