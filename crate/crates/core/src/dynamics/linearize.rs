use nalgebra::{Complex, DMatrix, DVector};

use super::DynamicsError;
use crate::models::{ms_equilibrium_residual, MsProblem, MsState};
use crate::spectral::real_modes;

/// Largest equilibrium residual accepted as a linearization point.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-6;
/// Eigenvalues below this fraction of the spectral radius count as zero.
pub const KERNEL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Stability {
    NormallyStable,
    NotNormallyStable(String),
}

#[derive(Debug, Clone)]
pub struct LinearizationReport {
    /// `A₀` in the basis `1, cos θ, sin θ, …, cos Kθ, sin Kθ`.
    pub matrix: DMatrix<f64>,
    pub modes: usize,
    /// Sorted by real part.
    pub eigenvalues: Vec<Complex<f64>>,
    /// Largest singular value of `A₀`.
    pub norm: f64,
    /// `‖A₀e‖` for `e = 1, cos θ, sin θ`.
    pub kernel_residuals: [f64; 3],
    pub kernel_dimension: usize,
    pub stability: Stability,
}

impl LinearizationReport {
    /// Index of `cos kθ` (`sin kθ` is the next one) in the basis.
    pub fn index(k: usize) -> usize {
        if k == 0 {
            0
        } else {
            2 * k - 1
        }
    }

    /// Decay rate of Fourier mode `k`: the mean of the two diagonal entries.
    pub fn mode_rate(&self, k: usize) -> f64 {
        let i = Self::index(k);
        if k == 0 {
            self.matrix[(0, 0)]
        } else {
            0.5 * (self.matrix[(i, i)] + self.matrix[(i + 1, i + 1)])
        }
    }

    /// Largest entry coupling different wavenumbers, relative to the largest entry.
    pub fn leakage(&self) -> f64 {
        let wave = |i: usize| i.div_ceil(2);
        let mut off: f64 = 0.0;
        let mut all: f64 = 0.0;
        for ((i, j), v) in self.matrix.iter().enumerate().map(|(idx, v)| ((idx % self.matrix.nrows(), idx / self.matrix.nrows()), v)) {
            all = all.max(v.abs());
            if wave(i) != wave(j) {
                off = off.max(v.abs());
            }
        }
        if all == 0.0 {
            0.0
        } else {
            off / all
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn basis_vector(theta: &[f64], idx: usize) -> Vec<f64> {
    let k = idx.div_ceil(2);
    theta
        .iter()
        .map(|t| match idx {
            0 => 1.0,
            i if i % 2 == 1 => (k as f64 * t).cos(),
            _ => (k as f64 * t).sin(),
        })
        .collect()
}

fn coordinates(samples: &[f64], modes: usize) -> Vec<f64> {
    let rm = real_modes(samples);
    let mut out = vec![rm[0].0];
    for (a, b) in rm.iter().take(modes + 1).skip(1) {
        out.push(*a);
        out.push(*b);
    }
    out
}

/// Central finite differences of `−ρ̇` in Fourier directions, retaining
/// wavenumbers up to `N/4`.
pub fn linearize_at(state: &MsState, h: f64) -> Result<LinearizationReport, DynamicsError> {
    let residual = ms_equilibrium_residual(state)?;
    if !(residual < EQUILIBRIUM_TOLERANCE) {
        return Err(DynamicsError::NotAnEquilibrium { residual });
    }
    let n = state.base().len();
    let modes = n / 4;
    let dim = 2 * modes + 1;
    // Any valid (p, μ) works here; the norms are not used.
    let problem = MsProblem::new(state.container(), state.base().clone(), 6.0, 0.7)?;
    let theta: Vec<f64> = (0..n).map(|j| state.base().theta(j)).collect();
    let rho = state.height().values();
    let mut matrix = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let e = basis_vector(&theta, c);
        let plus: Vec<f64> = rho.iter().zip(&e).map(|(r, v)| r + h * v).collect();
        let minus: Vec<f64> = rho.iter().zip(&e).map(|(r, v)| r - h * v).collect();
        let vp = problem.evaluate(&plus)?.velocity;
        let vm = problem.evaluate(&minus)?.velocity;
        let col: Vec<f64> = vp.iter().zip(&vm).map(|(a, b)| -(a - b) / (2.0 * h)).collect();
        for (r, v) in coordinates(&col, modes).into_iter().enumerate() {
            matrix[(r, c)] = v;
        }
    }
    let mut eigenvalues: Vec<Complex<f64>> = matrix.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let norm = matrix.clone().svd(false, false).singular_values.max();
    let kernel_residuals = [0, 1, 2].map(|i| {
        let mut e = DVector::zeros(dim);
        e[i] = 1.0;
        (&matrix * e).norm()
    });
    let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let kernel_dimension = eigenvalues.iter().filter(|z| z.norm() < KERNEL_TOLERANCE * radius).count();
    let others_positive = eigenvalues.iter().filter(|z| z.norm() >= KERNEL_TOLERANCE * radius).all(|z| z.re > 0.0);
    let stability = if kernel_dimension == 3 && others_positive {
        Stability::NormallyStable
    } else if kernel_dimension != 3 {
        Stability::NotNormallyStable(format!("kernel dimension {kernel_dimension}"))
    } else {
        Stability::NotNormallyStable("eigenvalue with non-positive real part off the kernel".into())
    };
    Ok(LinearizationReport { matrix, modes, eigenvalues, norm, kernel_residuals, kernel_dimension, stability })
}
