//! Periodic and sine-series spectral helpers shared by the curve, height-field
//! and norm code.
//!
//! Periodic samples live on the uniform grid `θ_j = 2πj/N`. Coefficients are
//! stored in FFT order and normalized so that `f(θ) = Σ c_k e^{ikθ}`. The
//! Nyquist mode is treated as `c_{N/2} cos(Nθ/2)`, which keeps derivatives and
//! interpolants of real data real.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Signed wavenumber of FFT slot `idx` for `n` samples.
pub fn wavenumber(idx: usize, n: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// Uniform periodic nodes `2πj/n`.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

pub fn forward(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

pub fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

pub fn forward_real(samples: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward(&buf)
}

/// Multiplier of the `order`-th derivative for FFT slot `idx`.
fn derivative_factor(idx: usize, n: usize, order: u32) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let k = wavenumber(idx, n) as f64;
    if n % 2 == 0 && idx == n / 2 {
        // cos(Nθ/2) has vanishing odd derivatives at the nodes
        if order % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let sign = if (order / 2) % 2 == 0 { 1.0 } else { -1.0 };
        return Complex64::new(sign * k.abs().powi(order as i32), 0.0);
    }
    Complex64::new(0.0, k).powu(order)
}

pub fn differentiate_complex(samples: &[Complex64], order: u32) -> Vec<Complex64> {
    let n = samples.len();
    let mut c = forward(samples);
    for (idx, ck) in c.iter_mut().enumerate() {
        *ck *= derivative_factor(idx, n, order);
    }
    inverse(&c)
}

/// Spectral derivative of real periodic samples.
pub fn differentiate(samples: &[f64], order: u32) -> Vec<f64> {
    let buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    differentiate_complex(&buf, order).into_iter().map(|z| z.re).collect()
}

/// Evaluate the trigonometric interpolant (and derivatives up to `order`)
/// at an arbitrary parameter.
pub fn evaluate(coeffs: &[Complex64], theta: f64, order: u32) -> Complex64 {
    let n = coeffs.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, &c) in coeffs.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let k = wavenumber(idx, n) as f64;
        if n % 2 == 0 && idx == n / 2 {
            // c cos(kθ) and its derivatives
            let d = match order % 4 {
                0 => (k * theta).cos(),
                1 => -(k * theta).sin(),
                2 => -(k * theta).cos(),
                _ => (k * theta).sin(),
            };
            acc += c * d * k.powi(order as i32);
            continue;
        }
        let phase = Complex64::from_polar(1.0, k * theta);
        acc += c * phase * Complex64::new(0.0, k).powu(order);
    }
    acc
}

pub fn evaluate_real(coeffs: &[Complex64], theta: f64, order: u32) -> f64 {
    evaluate(coeffs, theta, order).re
}

/// Apply a radial Fourier multiplier `m(|k|)` to real periodic samples.
pub fn apply_multiplier(samples: &[f64], multiplier: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = samples.len();
    let mut c = forward_real(samples);
    for (idx, ck) in c.iter_mut().enumerate() {
        *ck *= multiplier(wavenumber(idx, n).unsigned_abs() as f64);
    }
    inverse(&c).into_iter().map(|z| z.re).collect()
}

/// Real cosine/sine amplitudes `(a_k, b_k)` for `k = 0..=n/2` of real samples,
/// so that `f = a_0 + Σ a_k cos kθ + b_k sin kθ`.
pub fn real_modes(samples: &[f64]) -> Vec<(f64, f64)> {
    let n = samples.len();
    let c = forward_real(samples);
    (0..=n / 2)
        .map(|k| {
            if k == 0 || (n % 2 == 0 && k == n / 2) {
                (c[k].re, 0.0)
            } else {
                (2.0 * c[k].re, -2.0 * c[k].im)
            }
        })
        .collect()
}

/// Largest coefficient magnitude in the top quarter of the spectrum relative
/// to the largest overall.
pub fn tail_ratio(samples: &[f64]) -> f64 {
    let n = samples.len();
    let c = forward_real(samples);
    let max_all = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_all == 0.0 {
        return 0.0;
    }
    let cut = (3 * n / 8).max(1);
    let max_tail = c
        .iter()
        .enumerate()
        .filter(|(idx, _)| wavenumber(*idx, n).unsigned_abs() as usize >= cut)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    max_tail / max_all
}

/// Sine coefficients of interior samples `u_i = u(i/(n+1))`, `i = 1..=n`.
pub fn sine_coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let m = (n + 1) as f64;
    (1..=n)
        .map(|k| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(i, &u)| u * (PI * k as f64 * (i + 1) as f64 / m).sin())
                .sum();
            2.0 * s / m
        })
        .collect()
}

pub fn sine_synthesis(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let m = (n + 1) as f64;
    (1..=n)
        .map(|i| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &b)| b * (PI * (k + 1) as f64 * i as f64 / m).sin())
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_trig_polynomial_is_exact() {
        let n = 32;
        let th = nodes(n);
        let f: Vec<f64> = th.iter().map(|t| (3.0 * t).cos() + 0.5 * (5.0 * t).sin()).collect();
        let d1 = differentiate(&f, 1);
        let d2 = differentiate(&f, 2);
        for (j, t) in th.iter().enumerate() {
            let e1 = -3.0 * (3.0 * t).sin() + 2.5 * (5.0 * t).cos();
            let e2 = -9.0 * (3.0 * t).cos() - 12.5 * (5.0 * t).sin();
            assert!((d1[j] - e1).abs() < 1e-12);
            assert!((d2[j] - e2).abs() < 1e-11);
        }
    }

    #[test]
    fn interpolant_matches_off_grid() {
        let n = 16;
        let f: Vec<f64> = nodes(n).iter().map(|t| 1.0 + (2.0 * t).sin()).collect();
        let c = forward_real(&f);
        let t = 0.3721;
        assert!((evaluate_real(&c, t, 0) - (1.0 + (2.0 * t).sin())).abs() < 1e-13);
        assert!((evaluate_real(&c, t, 1) - 2.0 * (2.0 * t).cos()).abs() < 1e-12);
    }

    #[test]
    fn real_modes_recover_amplitudes() {
        let n = 16;
        let f: Vec<f64> = nodes(n).iter().map(|t| 0.25 + 2.0 * (3.0 * t).cos() - (t).sin()).collect();
        let m = real_modes(&f);
        assert!((m[0].0 - 0.25).abs() < 1e-14);
        assert!((m[3].0 - 2.0).abs() < 1e-14);
        assert!((m[1].1 + 1.0).abs() < 1e-14);
    }

    #[test]
    fn sine_transform_roundtrip() {
        let v = vec![0.3, -1.0, 2.0, 0.5, 0.1];
        let back = sine_synthesis(&sine_coefficients(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
