use super::{NormSuite, Space, StepError};

/// Time grid `t_j = T (j/N)^q` for the weighted class `t^{1−μ} u ∈ L_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGrid {
    horizon: f64,
    steps: usize,
    grading: f64,
    p: f64,
    mu: f64,
    nodes: Vec<f64>,
}

fn check_p_mu(p: f64, mu: f64) -> Result<(), StepError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(StepError::ParameterOutOfRange(format!("p = {p} must lie in (1, inf)")));
    }
    if !(mu > 1.0 / p && mu <= 1.0) {
        return Err(StepError::ParameterOutOfRange(format!("mu = {mu} must lie in (1/p, 1] = ({}, 1]", 1.0 / p)));
    }
    Ok(())
}

/// Grading exponent resolving a `t^{μ−1/p}` initial layer.
pub fn default_grading(p: f64, mu: f64) -> f64 {
    (2.0 / (mu - 1.0 / p)).max(1.0)
}

impl WeightedGrid {
    pub fn new(horizon: f64, steps: usize, grading: f64, p: f64, mu: f64) -> Result<Self, StepError> {
        check_p_mu(p, mu)?;
        if !(horizon > 0.0 && horizon.is_finite()) || steps == 0 || !(grading >= 1.0) {
            return Err(StepError::ParameterOutOfRange(format!(
                "grid needs T > 0, N_t > 0, q >= 1 (got {horizon}, {steps}, {grading})"
            )));
        }
        let nodes = (0..=steps).map(|j| horizon * (j as f64 / steps as f64).powf(grading)).collect();
        Ok(Self { horizon, steps, grading, p, mu, nodes })
    }

    pub fn graded(horizon: f64, steps: usize, p: f64, mu: f64) -> Result<Self, StepError> {
        Self::new(horizon, steps, default_grading(p, mu), p, mu)
    }

    pub fn uniform(horizon: f64, steps: usize, p: f64, mu: f64) -> Result<Self, StepError> {
        Self::new(horizon, steps, 1.0, p, mu)
    }

    /// Same parameters on `[0, horizon]`.
    pub fn rescaled(&self, horizon: f64) -> Result<Self, StepError> {
        Self::new(horizon, self.steps, self.grading, self.p, self.mu)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn dt(&self, j: usize) -> f64 {
        self.nodes[j] - self.nodes[j - 1]
    }

    /// Exact weight moments `∫_{t_{j−1}}^{t_j} t^{(1−μ)p} dt`, `j = 1..=N`.
    pub fn weights(&self) -> Vec<f64> {
        let e = (1.0 - self.mu) * self.p + 1.0;
        (1..=self.steps).map(|j| (self.nodes[j].powf(e) - self.nodes[j - 1].powf(e)) / e).collect()
    }
}

fn check_len(states: &[Vec<f64>], grid: &WeightedGrid) -> Result<(), StepError> {
    if states.len() != grid.steps + 1 {
        return Err(StepError::GridMismatch { expected: grid.steps + 1, got: states.len() });
    }
    Ok(())
}

/// `‖t^{1−μ} u‖_{L_p(0,T;X)}` for states at the grid nodes, with `u` taken
/// piecewise constant from the right endpoint of each interval.
pub fn weighted_norm(states: &[Vec<f64>], grid: &WeightedGrid, norm: impl Fn(&[f64]) -> f64) -> Result<f64, StepError> {
    check_len(states, grid)?;
    let p = grid.p;
    let s: f64 = grid.weights().iter().zip(&states[1..]).map(|(w, u)| w * norm(u).powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

/// `‖u‖_{L_{p,μ}} + ‖u̇‖_{L_{p,μ}}` with backward differences for `u̇`.
pub fn weighted_h1_norm(states: &[Vec<f64>], grid: &WeightedGrid, norm: impl Fn(&[f64]) -> f64) -> Result<f64, StepError> {
    check_len(states, grid)?;
    let p = grid.p;
    let mut s = 0.0;
    for (j, w) in grid.weights().iter().enumerate() {
        let dt = grid.dt(j + 1);
        let d: Vec<f64> = states[j + 1].iter().zip(&states[j]).map(|(a, b)| (a - b) / dt).collect();
        s += w * norm(&d).powf(p);
    }
    Ok(weighted_norm(states, grid, &norm)? + s.powf(1.0 / p))
}

/// `‖u‖_{E_{0,μ}} = ‖u‖_{L_{p,μ}(X_0)}`.
pub fn e0_norm(states: &[Vec<f64>], grid: &WeightedGrid, suite: &NormSuite) -> Result<f64, StepError> {
    weighted_norm(states, grid, |u| suite.norm(Space::X0, u))
}

/// `‖u‖_{E_{1,μ}} = ‖u‖_{H¹_{p,μ}(X_0)} + ‖u‖_{L_{p,μ}(X_1)}`.
pub fn e1_norm(states: &[Vec<f64>], grid: &WeightedGrid, suite: &NormSuite) -> Result<f64, StepError> {
    Ok(weighted_h1_norm(states, grid, |u| suite.norm(Space::X0, u))? + weighted_norm(states, grid, |u| suite.norm(Space::X1, u))?)
}

/// `σ(T) = (1 + (1−μ)p)^{−1/p} T^{1/p + 1 − μ}`.
pub fn sigma_factor(horizon: f64, p: f64, mu: f64) -> Result<f64, StepError> {
    check_p_mu(p, mu)?;
    if !(horizon > 0.0) {
        return Err(StepError::ParameterOutOfRange(format!("T = {horizon} must be positive")));
    }
    Ok((1.0 + (1.0 - mu) * p).powf(-1.0 / p) * horizon.powf(1.0 / p + 1.0 - mu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mu0Kind {
    SecondOrder,
    MullinsSekerka,
}

/// Critical weight `μ₀` below which the data are too rough for the theory.
pub fn compute_mu0(n: usize, p: f64, kind: Mu0Kind) -> Result<f64, StepError> {
    let n = n as f64;
    match kind {
        Mu0Kind::SecondOrder => {
            if !(p > n + 2.0) {
                return Err(StepError::ParameterOutOfRange(format!("second-order problems need p > n+2 = {}", n + 2.0)));
            }
            Ok(0.5 + (n + 2.0) / (2.0 * p))
        }
        Mu0Kind::MullinsSekerka => {
            if !(p > (n + 3.0) / 2.0) {
                return Err(StepError::ParameterOutOfRange(format!(
                    "Mullins-Sekerka needs p > (n+3)/2 = {}",
                    (n + 3.0) / 2.0
                )));
            }
            Ok(1.0 / 3.0 + (n + 3.0) / (3.0 * p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_norm(u: &[f64]) -> f64 {
        u[0].abs()
    }

    #[test]
    fn constant_unit_weight() {
        let g = WeightedGrid::uniform(1.0, 10, 2.0, 1.0).unwrap();
        let states = vec![vec![1.0]; 11];
        assert!((weighted_norm(&states, &g, abs_norm).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_matches_sigma() {
        for &(t, p, mu) in &[(1.0, 2.0, 0.75), (0.3, 4.0, 0.6), (2.0, 3.0, 1.0)] {
            let g = WeightedGrid::graded(t, 17, p, mu).unwrap();
            let states = vec![vec![1.0]; 18];
            let direct = (1.0 + (1.0 - mu) * p).powf(-1.0 / p) * t.powf(1.0 / p + 1.0 - mu);
            assert!((weighted_norm(&states, &g, abs_norm).unwrap() - direct).abs() < 1e-13);
            assert!((sigma_factor(t, p, mu).unwrap() - direct).abs() < 1e-15);
        }
        assert!((sigma_factor(1.0, 2.0, 0.75).unwrap() - 1.0 / 1.5_f64.sqrt()).abs() < 1e-15);
        assert!((sigma_factor(0.5, 3.0, 1.0).unwrap() - 0.5_f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn singular_profile_converges() {
        let mut errs = Vec::new();
        for &steps in &[100, 1000, 10000] {
            let g = WeightedGrid::uniform(1.0, steps, 2.0, 0.75).unwrap();
            let states: Vec<Vec<f64>> = g.nodes().iter().map(|t| vec![t.powf(-0.25)]).collect();
            errs.push((weighted_norm(&states, &g, abs_norm).unwrap() - 1.0).abs());
        }
        assert!(errs[2] < 1e-3 && errs[1] < errs[0] && errs[2] < errs[1]);
    }

    #[test]
    fn homogeneity_and_dominance() {
        let g = WeightedGrid::graded(0.5, 20, 4.0, 0.8).unwrap();
        let suite = NormSuite::euclidean(4.0);
        let states: Vec<Vec<f64>> = g.nodes().iter().map(|t| vec![(-t).exp(), t.sin()]).collect();
        let scaled: Vec<Vec<f64>> = states.iter().map(|u| u.iter().map(|x| -2.5 * x).collect()).collect();
        let a = e1_norm(&states, &g, &suite).unwrap();
        assert!((e1_norm(&scaled, &g, &suite).unwrap() - 2.5 * a).abs() < 1e-12 * a);
        assert!(a >= e0_norm(&states, &g, &suite).unwrap());
        assert!(matches!(weighted_norm(&states[1..], &g, abs_norm), Err(StepError::GridMismatch { .. })));
    }

    #[test]
    fn mu0_values() {
        assert!((compute_mu0(1, 4.0, Mu0Kind::SecondOrder).unwrap() - 7.0 / 8.0).abs() < 1e-15);
        assert!((compute_mu0(2, 6.0, Mu0Kind::MullinsSekerka).unwrap() - 11.0 / 18.0).abs() < 1e-15);
        assert!(compute_mu0(2, 4.0, Mu0Kind::SecondOrder).is_err());
        assert!(WeightedGrid::uniform(1.0, 4, 2.0, 0.5).is_err());
    }

    #[test]
    fn grading_nodes() {
        let g = WeightedGrid::graded(1.0, 8, 6.0, 0.65).unwrap();
        assert!((g.grading() - 2.0 / (0.65 - 1.0 / 6.0)).abs() < 1e-14);
        assert_eq!(g.nodes()[0], 0.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!((g.nodes()[8] - 1.0).abs() < 1e-15);
    }
}
