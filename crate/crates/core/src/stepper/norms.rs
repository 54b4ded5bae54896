use std::f64::consts::PI;

use crate::spectral::{apply_multiplier, sine_coefficients, sine_synthesis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    X0,
    X1,
    /// Weighted trace space `X_{γ,μ}`.
    TraceMu,
    /// Unweighted trace space `X_γ`.
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Interior nodes `i/(n+1)` of `(0,1)` with zero Dirichlet trace.
    Sine,
    /// Equispaced nodes on a closed curve parameterized over `[0, 2π)`.
    Periodic,
    /// Plain vector `ℓ_p` norm for every space.
    Euclidean,
}

/// Discrete Bessel-potential norms `|(1 − Δ)^{s/2} u|_{L_p}` for the four
/// spaces of a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSuite {
    basis: Basis,
    p: f64,
    orders: [f64; 4],
}

impl NormSuite {
    pub fn new(basis: Basis, p: f64, orders: [f64; 4]) -> Self {
        Self { basis, p, orders }
    }

    pub fn euclidean(p: f64) -> Self {
        Self::new(Basis::Euclidean, p, [0.0; 4])
    }

    /// Second-order problems: `X_0 = L_p`, `X_1 = W²_p`.
    pub fn second_order(p: f64, mu: f64) -> Self {
        Self::new(Basis::Sine, p, [0.0, 2.0, 2.0 * mu - 2.0 / p, 2.0 - 2.0 / p])
    }

    /// Mullins-Sekerka heights: `X_0 = W^{1−1/p}_p`, `X_1 = W^{4−1/p}_p`.
    pub fn mullins_sekerka(p: f64, mu: f64) -> Self {
        Self::new(Basis::Periodic, p, [1.0 - 1.0 / p, 4.0 - 1.0 / p, 3.0 * mu + 1.0 - 4.0 / p, 4.0 - 4.0 / p])
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn order(&self, space: Space) -> f64 {
        self.orders[match space {
            Space::X0 => 0,
            Space::X1 => 1,
            Space::TraceMu => 2,
            Space::Trace => 3,
        }]
    }

    pub fn norm(&self, space: Space, u: &[f64]) -> f64 {
        self.sobolev(self.order(space), u)
    }

    pub fn sobolev(&self, s: f64, u: &[f64]) -> f64 {
        let p = self.p;
        let (v, h) = match self.basis {
            Basis::Euclidean => (u.to_vec(), 1.0),
            Basis::Sine => {
                let b = sine_coefficients(u);
                let scaled: Vec<f64> = b
                    .iter()
                    .enumerate()
                    .map(|(k, bk)| bk * (1.0 + (PI * (k + 1) as f64).powi(2)).powf(s / 2.0))
                    .collect();
                (sine_synthesis(&scaled), 1.0 / (u.len() + 1) as f64)
            }
            Basis::Periodic => (apply_multiplier(u, |k| (1.0 + k * k).powf(s / 2.0)), 2.0 * PI / u.len() as f64),
        };
        (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() * h).powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_mode_scales_with_symbol() {
        let n = 31;
        let suite = NormSuite::second_order(2.0, 1.0);
        let u: Vec<f64> = (1..=n).map(|i| (3.0 * PI * i as f64 / 32.0).sin()).collect();
        let base = suite.sobolev(0.0, &u);
        assert!((base - 0.5_f64.sqrt()).abs() < 1e-12);
        let x1 = suite.norm(Space::X1, &u);
        assert!((x1 / base - (1.0 + 9.0 * PI * PI)).abs() < 1e-9);
    }

    #[test]
    fn periodic_homogeneity() {
        let suite = NormSuite::mullins_sekerka(6.0, 0.7);
        let u: Vec<f64> = (0..32).map(|j| (2.0 * PI * j as f64 / 32.0 * 2.0).cos() + 0.1).collect();
        let a = suite.norm(Space::Trace, &u);
        let b = suite.norm(Space::Trace, &u.iter().map(|x| -3.0 * x).collect::<Vec<_>>());
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
        assert_eq!(suite.norm(Space::X0, &[0.0; 32]), 0.0);
    }
}
