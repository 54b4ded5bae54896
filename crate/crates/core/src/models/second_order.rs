use crate::stepper::{FrozenOperator, NormSuite, QuasilinearProblem, StepError};

/// `u_t − a(u, u_x) u_xx = f(u, u_x)` on `(0,1)` with `u = 0` at both ends,
/// second-order finite differences on `m` interior nodes.
pub struct SecondOrderProblem<A, F> {
    a: A,
    f: F,
    m: usize,
    h: f64,
    suite: NormSuite,
}

pub fn make_second_order<A, F>(a: A, f: F, m: usize, p: f64, mu: f64) -> SecondOrderProblem<A, F>
where
    A: Fn(f64, f64) -> f64,
    F: Fn(f64, f64) -> f64,
{
    assert!(m >= 2, "need at least two interior nodes");
    SecondOrderProblem { a, f, m, h: 1.0 / (m + 1) as f64, suite: NormSuite::second_order(p, mu) }
}

impl<A, F> SecondOrderProblem<A, F> {
    /// Interior nodes `x_i = i/(m+1)`.
    pub fn mesh(&self) -> Vec<f64> {
        (1..=self.m).map(|i| i as f64 * self.h).collect()
    }

    /// Central difference of `u_x` with zero boundary values.
    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|i| {
                let left = if i == 0 { 0.0 } else { v[i - 1] };
                let right = if i + 1 == m { 0.0 } else { v[i + 1] };
                (right - left) / (2.0 * self.h)
            })
            .collect()
    }
}

/// `A(v) = −c_i (u_{i−1} − 2u_i + u_{i+1}) / h²`.
pub struct TridiagonalFrozen {
    coeff: Vec<f64>,
    h: f64,
}

impl TridiagonalFrozen {
    pub fn coefficients(&self) -> &[f64] {
        &self.coeff
    }
}

impl FrozenOperator for TridiagonalFrozen {
    fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        let h2 = self.h * self.h;
        (0..m)
            .map(|i| {
                let left = if i == 0 { 0.0 } else { u[i - 1] };
                let right = if i + 1 == m { 0.0 } else { u[i + 1] };
                -self.coeff[i] * (left - 2.0 * u[i] + right) / h2
            })
            .collect()
    }

    fn implicit_solve(&self, dt: f64, rhs: &[f64]) -> Result<Vec<f64>, StepError> {
        let m = rhs.len();
        let h2 = self.h * self.h;
        let off: Vec<f64> = self.coeff.iter().map(|c| -dt * c / h2).collect();
        let diag: Vec<f64> = self.coeff.iter().map(|c| 1.0 + 2.0 * dt * c / h2).collect();
        // Thomas algorithm; row i couples to i−1 and i+1 with the same coefficient `off[i]`.
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        cp[0] = off[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for i in 1..m {
            let denom = diag[i] - off[i] * cp[i - 1];
            if denom == 0.0 {
                return Err(StepError::Backend("singular tridiagonal system".into()));
            }
            cp[i] = off[i] / denom;
            dp[i] = (rhs[i] - off[i] * dp[i - 1]) / denom;
        }
        let mut x = vec![0.0; m];
        x[m - 1] = dp[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        Ok(x)
    }
}

impl<A, F> QuasilinearProblem for SecondOrderProblem<A, F>
where
    A: Fn(f64, f64) -> f64,
    F: Fn(f64, f64) -> f64,
{
    type Frozen = TridiagonalFrozen;

    fn dim(&self) -> usize {
        self.m
    }

    fn norms(&self) -> &NormSuite {
        &self.suite
    }

    fn freeze(&self, v: &[f64]) -> Result<TridiagonalFrozen, StepError> {
        let grad = self.gradient(v);
        let mut coeff = Vec::with_capacity(self.m);
        for (i, (vi, gi)) in v.iter().zip(&grad).enumerate() {
            let c = (self.a)(*vi, *gi);
            if !(c > 0.0) {
                return Err(StepError::NonPositiveCoefficient { value: c, index: i });
            }
            coeff.push(c);
        }
        Ok(TridiagonalFrozen { coeff, h: self.h })
    }

    fn forcing(&self, v: &[f64]) -> Result<Vec<f64>, StepError> {
        Ok(v.iter().zip(self.gradient(v)).map(|(vi, gi)| (self.f)(*vi, gi)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn thomas_inverts_operator() {
        let prob = make_second_order(|u, _| 1.0 + u * u, |_, _| 0.0, 20, 4.0, 0.9);
        let v: Vec<f64> = prob.mesh().iter().map(|x| (PI * x).sin()).collect();
        let a = prob.freeze(&v).unwrap();
        let u: Vec<f64> = prob.mesh().iter().map(|x| x * (1.0 - x) + 0.3 * (3.0 * PI * x).sin()).collect();
        let au = a.apply(&u);
        let rhs: Vec<f64> = u.iter().zip(&au).map(|(x, y)| x + 0.01 * y).collect();
        let back = a.implicit_solve(0.01, &rhs).unwrap();
        for (x, y) in back.iter().zip(&u) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_coefficient_is_reported() {
        let prob = make_second_order(|u, _| 1.0 - u, |_, _| 0.0, 8, 4.0, 0.9);
        let v = vec![2.0; 8];
        assert!(matches!(prob.freeze(&v), Err(StepError::NonPositiveCoefficient { .. })));
    }

    #[test]
    fn discrete_laplacian_eigenvalue() {
        let m = 31;
        let prob = make_second_order(|_, _| 1.0, |_, _| 0.0, m, 4.0, 0.9);
        let v: Vec<f64> = prob.mesh().iter().map(|x| (PI * x).sin()).collect();
        let a = prob.freeze(&v).unwrap();
        let h = 1.0 / (m + 1) as f64;
        let lam = 4.0 / (h * h) * (PI * h / 2.0).sin().powi(2);
        for (x, y) in a.apply(&v).iter().zip(&v) {
            assert!((x - lam * y).abs() < 1e-10);
        }
    }
}
