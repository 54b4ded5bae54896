use super::{FrozenOperator, NormSuite, QuasilinearProblem, StepError};

/// `A + κI`, `F + κ·id`: same solutions, better-conditioned implicit steps.
#[derive(Debug, Clone)]
pub struct Shifted<P> {
    inner: P,
    kappa: f64,
}

pub fn spectral_shift<P: QuasilinearProblem>(problem: P, kappa: f64) -> Result<Shifted<P>, StepError> {
    if !(kappa >= 0.0) {
        return Err(StepError::ParameterOutOfRange(format!("shift {kappa} must be nonnegative")));
    }
    Ok(Shifted { inner: problem, kappa })
}

impl<P> Shifted<P> {
    pub fn inner(&self) -> &P {
        &self.inner
    }

    pub fn shift(&self) -> f64 {
        self.kappa
    }
}

pub struct ShiftedFrozen<F> {
    inner: F,
    kappa: f64,
}

impl<F: FrozenOperator> FrozenOperator for ShiftedFrozen<F> {
    fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.inner.apply(u).iter().zip(u).map(|(a, x)| a + self.kappa * x).collect()
    }

    fn implicit_solve(&self, dt: f64, rhs: &[f64]) -> Result<Vec<f64>, StepError> {
        // (I + dt(A + κ)) u = r  ⇔  (I + dt' A) u = r / (1 + dt κ), dt' = dt / (1 + dt κ)
        let c = 1.0 + dt * self.kappa;
        let scaled: Vec<f64> = rhs.iter().map(|r| r / c).collect();
        self.inner.implicit_solve(dt / c, &scaled)
    }
}

impl<P: QuasilinearProblem> QuasilinearProblem for Shifted<P> {
    type Frozen = ShiftedFrozen<P::Frozen>;

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn norms(&self) -> &NormSuite {
        self.inner.norms()
    }

    fn freeze(&self, v: &[f64]) -> Result<Self::Frozen, StepError> {
        Ok(ShiftedFrozen { inner: self.inner.freeze(v)?, kappa: self.kappa })
    }

    fn forcing(&self, v: &[f64]) -> Result<Vec<f64>, StepError> {
        Ok(self.inner.forcing(v)?.iter().zip(v).map(|(f, x)| f + self.kappa * x).collect())
    }

    fn split(&self, v: &[f64]) -> Result<(Self::Frozen, Vec<f64>), StepError> {
        let (a, f) = self.inner.split(v)?;
        let f = f.iter().zip(v).map(|(fi, x)| fi + self.kappa * x).collect();
        Ok((ShiftedFrozen { inner: a, kappa: self.kappa }, f))
    }

    fn check_admissible(&self, v: &[f64]) -> Result<(), StepError> {
        self.inner.check_admissible(v)
    }
}
