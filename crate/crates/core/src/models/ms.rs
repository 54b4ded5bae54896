//! Mullins-Sekerka flow for heights over a circle.
//!
//! With `K(ρ) = −a₂ ρ'' + Q` the curvature of `Γ_ρ`, `J` the jump operator on
//! `Γ_ρ` and `c = 1/(ν_Σ·ν_Γ)`,
//!
//! ```text
//! ρ̇ = c J K(ρ) = −A(ρ)ρ + F(ρ),   A(v)σ = −c J(−a₂ σ''),   F(v) = c J Q(v).
//! ```

use nalgebra::{DMatrix, DVector};

use super::linear::DenseFrozen;
use super::ModelError;
use crate::elliptic::{TwoPhaseOperator, TwoPhaseSolution};
use crate::geometry::{tube_and_ball, Container, ReferenceCurve, TubeData};
use crate::hanzawa::{realize_interface, split_curvature, HanzawaError, HeightField};
use crate::spectral;
use crate::stepper::{NormSuite, QuasilinearProblem, StepError};

/// Spectral second-derivative matrix on `n` equispaced nodes.
fn second_derivative_matrix(n: usize) -> DMatrix<f64> {
    let mut d2 = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = spectral::differentiate(&e, 2);
        for (i, v) in col.iter().enumerate() {
            d2[(i, j)] = *v;
        }
        e[j] = 0.0;
    }
    d2
}

/// Everything the flow needs at one state, from a single jump-operator assembly.
#[derive(Debug, Clone)]
pub struct MsEvaluation {
    pub interface: ReferenceCurve,
    /// Curvature of the interface at the nodes.
    pub curvature: Vec<f64>,
    /// Two-phase solution with Dirichlet data `κ`.
    pub solution: TwoPhaseSolution,
    /// Normal velocity `V = [[∂_ν u]]`.
    pub normal_velocity: Vec<f64>,
    /// `ρ̇`.
    pub velocity: Vec<f64>,
    /// `c = 1/(ν_Σ·ν_Γ)` at the nodes.
    pub metric: Vec<f64>,
    operator: TwoPhaseOperator,
    a2: Vec<f64>,
    q: Vec<f64>,
}

impl MsEvaluation {
    pub fn jump_operator(&self) -> &TwoPhaseOperator {
        &self.operator
    }
}

fn evaluate_height(h: &HeightField, container: &Container) -> Result<MsEvaluation, ModelError> {
    let circle = h.base().circle().ok_or(HanzawaError::UnsupportedBase)?;
    let interface = realize_interface(h, container)?;
    let split = split_curvature(h)?;
    let r1 = spectral::differentiate(h.values(), 1);
    let metric: Vec<f64> = h
        .values()
        .iter()
        .zip(&r1)
        .map(|(v, d)| {
            let r = circle.radius + v;
            (r * r + d * d).sqrt() / r
        })
        .collect();
    let curvature: Vec<f64> = split
        .apply_principal(h.values())
        .iter()
        .zip(&split.lower_order)
        .map(|(p, q)| p + q)
        .collect();
    let operator = TwoPhaseOperator::new(container, &interface)?;
    let solution = operator.solve(&curvature)?;
    let normal_velocity = solution.jump().to_vec();
    let velocity = normal_velocity.iter().zip(&metric).map(|(v, c)| v * c).collect();
    Ok(MsEvaluation {
        interface,
        curvature,
        solution,
        normal_velocity,
        velocity,
        metric,
        operator,
        a2: split.second_order_coeff,
        q: split.lower_order,
    })
}

/// Quasilinear form of the flow over a fixed reference circle.
#[derive(Debug, Clone)]
pub struct MsProblem {
    container: Container,
    base: ReferenceCurve,
    tube: TubeData,
    suite: NormSuite,
    d2: DMatrix<f64>,
}

impl MsProblem {
    pub fn new(container: &Container, base: ReferenceCurve, p: f64, mu: f64) -> Result<Self, ModelError> {
        if base.circle().is_none() {
            return Err(HanzawaError::UnsupportedBase.into());
        }
        let tube = tube_and_ball(&base, container).map_err(HanzawaError::from)?;
        let d2 = second_derivative_matrix(base.len());
        Ok(Self { container: *container, base, tube, suite: NormSuite::mullins_sekerka(p, mu), d2 })
    }

    pub fn container(&self) -> &Container {
        &self.container
    }

    pub fn base(&self) -> &ReferenceCurve {
        &self.base
    }

    pub fn tube(&self) -> &TubeData {
        &self.tube
    }

    pub fn height(&self, v: &[f64]) -> HeightField {
        HeightField::unchecked(self.base.clone(), self.tube, v.to_vec())
    }

    pub fn evaluate(&self, v: &[f64]) -> Result<MsEvaluation, ModelError> {
        evaluate_height(&self.height(v), &self.container)
    }

    /// `A(v)` and `F(v)` from an existing evaluation at `v`.
    pub fn split_from(&self, ev: &MsEvaluation) -> (DenseFrozen, Vec<f64>) {
        let n = self.base.len();
        let j = ev.operator.jump_matrix();
        let mut inner = self.d2.clone();
        for r in 0..n {
            inner.row_mut(r).scale_mut(ev.a2[r]);
        }
        let mut a = j * inner;
        for r in 0..n {
            a.row_mut(r).scale_mut(ev.metric[r]);
        }
        let f = j * DVector::from_column_slice(&ev.q);
        let f: Vec<f64> = f.iter().zip(&ev.metric).map(|(x, c)| x * c).collect();
        (DenseFrozen::new(a), f)
    }
}

fn to_step(e: ModelError) -> StepError {
    e.into()
}

impl QuasilinearProblem for MsProblem {
    type Frozen = DenseFrozen;

    fn dim(&self) -> usize {
        self.base.len()
    }

    fn norms(&self) -> &NormSuite {
        &self.suite
    }

    fn freeze(&self, v: &[f64]) -> Result<DenseFrozen, StepError> {
        Ok(self.split(v)?.0)
    }

    fn forcing(&self, v: &[f64]) -> Result<Vec<f64>, StepError> {
        Ok(self.split(v)?.1)
    }

    fn split(&self, v: &[f64]) -> Result<(DenseFrozen, Vec<f64>), StepError> {
        let ev = self.evaluate(v).map_err(to_step)?;
        Ok(self.split_from(&ev))
    }

    fn check_admissible(&self, v: &[f64]) -> Result<(), StepError> {
        self.height(v).validate().map_err(|e| to_step(e.into()))
    }
}

/// A height field over a circle together with its container.
#[derive(Debug, Clone)]
pub struct MsState {
    height: HeightField,
    container: Container,
    solution: Option<TwoPhaseSolution>,
}

impl MsState {
    pub fn new(height: HeightField, container: &Container) -> Result<Self, ModelError> {
        if height.base().circle().is_none() {
            return Err(HanzawaError::UnsupportedBase.into());
        }
        height.validate()?;
        Ok(Self { height, container: *container, solution: None })
    }

    /// Same base, new heights; admissibility is left to the caller.
    pub fn with_heights(&self, values: Vec<f64>) -> Self {
        Self { height: self.height.with_values(values), container: self.container, solution: None }
    }

    /// Zero heights over the circle itself.
    pub fn circle(base: ReferenceCurve, container: &Container) -> Result<Self, ModelError> {
        Self::new(HeightField::zero(base, container)?, container)
    }

    pub fn height(&self) -> &HeightField {
        &self.height
    }

    pub fn base(&self) -> &ReferenceCurve {
        self.height.base()
    }

    pub fn container(&self) -> &Container {
        &self.container
    }

    pub fn interface(&self) -> Result<ReferenceCurve, ModelError> {
        Ok(realize_interface(&self.height, &self.container)?)
    }

    /// Two-phase solution from the last `refresh`.
    pub fn cached_solution(&self) -> Option<&TwoPhaseSolution> {
        self.solution.as_ref()
    }

    /// Keep the two-phase solution of an evaluation made at this state.
    pub fn cache(&mut self, ev: &MsEvaluation) {
        self.solution = Some(ev.solution.clone());
    }

    /// Evaluate the flow at this state and cache the two-phase solution.
    pub fn refresh(&mut self) -> Result<MsEvaluation, ModelError> {
        let ev = evaluate_height(&self.height, &self.container)?;
        self.solution = Some(ev.solution.clone());
        Ok(ev)
    }
}

/// `ρ̇` at the state.
pub fn ms_vector_field(state: &MsState) -> Result<Vec<f64>, ModelError> {
    Ok(evaluate_height(&state.height, &state.container)?.velocity)
}

/// `|ρ̇|_∞`; zero exactly at circles.
pub fn ms_equilibrium_residual(state: &MsState) -> Result<f64, ModelError> {
    Ok(ms_vector_field(state)?.iter().fold(0.0, |m, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::concentric_jump_eigenvalue;
    use crate::stepper::FrozenOperator;
    use crate::geometry::{Circle, CurveSpec};

    fn base(r: f64, n: usize) -> ReferenceCurve {
        ReferenceCurve::build(&CurveSpec::Circle(Circle::centered(r)), n, &Container::unit()).unwrap()
    }

    fn state(r: f64, n: usize, f: impl Fn(f64) -> f64) -> MsState {
        let b = base(r, n);
        let v = (0..n).map(|j| f(b.theta(j))).collect();
        MsState::new(HeightField::new(b, &Container::unit(), v).unwrap(), &Container::unit()).unwrap()
    }

    #[test]
    fn constant_heights_are_stationary() {
        let s = state(0.5, 64, |_| 0.03);
        assert!(ms_equilibrium_residual(&s).unwrap() < 1e-9);
    }

    #[test]
    fn mode_two_dispersion() {
        let eps = 1e-4;
        let s = state(0.5, 64, |t| eps * (2.0 * t).cos());
        let v = ms_vector_field(&s).unwrap();
        let lam = 1536.0 / 17.0;
        for (j, vj) in v.iter().enumerate() {
            let want = -lam * s.height().values()[j];
            assert!((vj - want).abs() < 0.01 * lam * eps, "{vj} vs {want}");
        }
    }

    #[test]
    fn reassembly_and_principal_symbol() {
        let n = 64;
        let prob = MsProblem::new(&Container::unit(), base(0.5, n), 6.0, 0.7).unwrap();
        let b = prob.base().clone();
        let v: Vec<f64> = (0..n).map(|j| 0.01 * (3.0 * b.theta(j)).sin() + 0.005 * (2.0 * b.theta(j)).cos()).collect();
        let ev = prob.evaluate(&v).unwrap();
        let (a, f) = prob.split_from(&ev);
        let av = a.apply(&v);
        for j in 0..n {
            assert!((f[j] - av[j] - ev.velocity[j]).abs() < 1e-10);
        }
        let zero = vec![0.0; n];
        let a0 = prob.freeze(&zero).unwrap();
        for k in 2..8u32 {
            let e: Vec<f64> = (0..n).map(|j| (k as f64 * b.theta(j)).cos()).collect();
            let want = -concentric_jump_eigenvalue(k, 0.5, 1.0) * (k * k) as f64 / 0.25;
            for (x, y) in a0.apply(&e).iter().zip(&e) {
                assert!((x - want * y).abs() < 1e-7 * want, "k={k}");
            }
        }
    }

    #[test]
    fn area_rate_vanishes() {
        let s = state(0.45, 64, |t| 0.01 * (3.0 * t).cos() - 0.008 * (2.0 * t).sin());
        let mut s2 = s.clone();
        let ev = s2.refresh().unwrap();
        let flux = ev.solution.integrate(&ev.normal_velocity);
        assert!(flux.abs() < 1e-9 * ev.interface.perimeter());
        assert!(s2.cached_solution().is_some());
    }
}
