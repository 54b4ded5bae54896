use nalgebra::{DMatrix, DVector};

use crate::stepper::{FrozenOperator, NormSuite, QuasilinearProblem, StepError};

/// Constant-coefficient system `u̇ + A u = f`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: DMatrix<f64>,
    f: Vec<f64>,
    suite: NormSuite,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, f: Vec<f64>, suite: NormSuite) -> Self {
        assert!(a.is_square() && a.nrows() == f.len(), "A must be square and match f");
        Self { a, f, suite }
    }

    pub fn scalar(a: f64, f: f64, p: f64) -> Self {
        Self::new(DMatrix::from_element(1, 1, a), vec![f], NormSuite::euclidean(p))
    }
}

#[derive(Debug, Clone)]
pub struct DenseFrozen {
    a: DMatrix<f64>,
}

impl DenseFrozen {
    pub fn new(a: DMatrix<f64>) -> Self {
        Self { a }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl FrozenOperator for DenseFrozen {
    fn apply(&self, u: &[f64]) -> Vec<f64> {
        (&self.a * DVector::from_column_slice(u)).as_slice().to_vec()
    }

    fn implicit_solve(&self, dt: f64, rhs: &[f64]) -> Result<Vec<f64>, StepError> {
        let n = self.a.nrows();
        let m = DMatrix::identity(n, n) + &self.a * dt;
        m.lu()
            .solve(&DVector::from_column_slice(rhs))
            .map(|x| x.as_slice().to_vec())
            .ok_or_else(|| StepError::Backend(format!("I + dt A singular at dt = {dt:e}")))
    }
}

impl QuasilinearProblem for LinearSystem {
    type Frozen = DenseFrozen;

    fn dim(&self) -> usize {
        self.f.len()
    }

    fn norms(&self) -> &NormSuite {
        &self.suite
    }

    fn freeze(&self, _v: &[f64]) -> Result<DenseFrozen, StepError> {
        Ok(DenseFrozen::new(self.a.clone()))
    }

    fn forcing(&self, _v: &[f64]) -> Result<Vec<f64>, StepError> {
        Ok(self.f.clone())
    }
}
