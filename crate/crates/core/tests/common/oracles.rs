//! Reference computations that share no code with the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Centered B-splines built by repeated numerical convolution with the unit
/// box, `β⁽ⁿ⁾ = β⁽ⁿ⁻¹⁾ * β⁽⁰⁾`, tabulated on a uniform grid.
pub struct ConvolutionOracle {
    h: f64,
    half_width: f64,
    // levels[n][i] = β⁽ⁿ⁾(−half_width + i·h)
    levels: Vec<Vec<f64>>,
}

impl ConvolutionOracle {
    /// Tabulates orders `0..=max_order` at spacing `h` (`1/(2h)` must be an
    /// integer so that ±½ shifts land on grid points).
    pub fn new(max_order: usize, h: f64) -> Self {
        let half_width = (max_order as f64 + 1.0) / 2.0 + 1.0;
        let n = (2.0 * half_width / h).round() as usize + 1;
        let shift = (0.5 / h).round() as usize;
        let x = |i: usize| -half_width + i as f64 * h;
        let box_ = (0..n)
            .map(|i| match x(i).abs() {
                a if a < 0.5 - h / 4.0 => 1.0,
                a if a <= 0.5 + h / 4.0 => 0.5,
                _ => 0.0,
            })
            .collect::<Vec<_>>();
        let mut levels = vec![box_];
        if max_order >= 1 {
            // box * box, exactly: overlap length of two unit intervals
            levels.push((0..n).map(|i| (1.0 - x(i).abs()).max(0.0)).collect());
        }
        for _ in 2..=max_order {
            let prev = levels.last().unwrap();
            // cumulative trapezoid C(x) = ∫_{−W}^{x} prev
            let mut cum = vec![0.0; n];
            for i in 1..n {
                cum[i] = cum[i - 1] + 0.5 * h * (prev[i - 1] + prev[i]);
            }
            let at = |i: isize| -> f64 {
                if i < 0 {
                    0.0
                } else if i as usize >= n {
                    cum[n - 1]
                } else {
                    cum[i as usize]
                }
            };
            let next = (0..n)
                .map(|i| at(i as isize + shift as isize) - at(i as isize - shift as isize))
                .collect();
            levels.push(next);
        }
        Self {
            h,
            half_width,
            levels,
        }
    }

    /// `β⁽ⁿ⁾(x)`: linear interpolation of the table for `n ≤ 1` (exact, the
    /// breakpoints are grid points), cubic Lagrange otherwise.
    pub fn eval(&self, order: usize, x: f64) -> f64 {
        let table = &self.levels[order];
        if order == 0 {
            let a = x.abs();
            return if a < 0.5 {
                1.0
            } else if a == 0.5 {
                0.5
            } else {
                0.0
            };
        }
        if x.abs() >= self.half_width - 2.0 * self.h {
            return 0.0;
        }
        let u = (x + self.half_width) / self.h;
        let i = u.floor() as usize;
        let t = u - i as f64;
        if order == 1 {
            return table[i] * (1.0 - t) + table[i + 1] * t;
        }
        // nodes i−1, i, i+1, i+2
        let (p0, p1, p2, p3) = (table[i - 1], table[i], table[i + 1], table[i + 2]);
        let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        (l0 * p0 + l1 * p1 + l2 * p2 + l3 * p3).max(0.0)
    }
}

/// BSI coefficients without any boundary folding: the samples are unrolled
/// by whole-sample reflection into a sequence `copies` times as long, the
/// plain (truncated) Toeplitz collocation system is solved densely and the
/// coefficients of the central copy are returned. Truncation effects decay
/// geometrically away from the ends of the unrolled sequence.
pub fn unrolled_bsi_coefficients(
    oracle: &ConvolutionOracle,
    order: usize,
    samples: &[f64],
    copies: usize,
) -> Vec<f64> {
    let n = samples.len();
    let period = 2 * (n - 1);
    let reflect = |i: i64| {
        let m = i.rem_euclid(period as i64) as usize;
        if m < n {
            samples[m]
        } else {
            samples[period - m]
        }
    };
    let half = (copies / 2) as i64 * period as i64;
    let total = copies * period + 1;
    let first = -half;
    let band = order / 2;
    let taps: Vec<f64> = (0..=band).map(|d| oracle.eval(order, d as f64)).collect();
    let a = DMatrix::from_fn(total, total, |i, j| {
        let d = i.abs_diff(j);
        if d <= band {
            taps[d]
        } else {
            0.0
        }
    });
    let rhs = DVector::from_fn(total, |i, _| reflect(first + i as i64));
    let c = a
        .lu()
        .solve(&rhs)
        .expect("Toeplitz B-spline system is nonsingular");
    (0..n).map(|k| c[(half + k as i64) as usize]).collect()
}

/// Evaluates `Σ_k c[k] β⁽ⁿ⁾(x/T − k − k₀)` with coefficients extended by the
/// same whole-sample reflection, summing over a generous index window.
pub fn bsi_eval(
    oracle: &ConvolutionOracle,
    order: usize,
    coeffs: &[f64],
    k0: i64,
    step: f64,
    x: f64,
) -> f64 {
    let n = coeffs.len();
    let period = (2 * (n - 1)).max(1) as i64;
    let u = x / step - k0 as f64;
    let reach = order as i64 + 2;
    let base = u.floor() as i64;
    (base - reach..=base + reach)
        .map(|l| {
            let m = l.rem_euclid(period) as usize;
            let c = if n == 1 {
                coeffs[0]
            } else if m < n {
                coeffs[m]
            } else {
                coeffs[period as usize - m]
            };
            c * oracle.eval(order, u - l as f64)
        })
        .sum()
}

/// Smallest and largest eigenvalues of the `size × size` Gram matrix of the
/// unit-step standard basis, using `⟨β⁽ⁿ⁾(· − k), β⁽ⁿ⁾(· − l)⟩ = β⁽²ⁿ⁺¹⁾(k − l)`.
pub fn standard_gram_extremes(oracle: &ConvolutionOracle, order: usize, size: usize) -> (f64, f64) {
    let g = DMatrix::from_fn(size, size, |i, j| {
        oracle.eval(2 * order + 1, i as f64 - j as f64)
    });
    let eig = g.symmetric_eigenvalues();
    (eig.min(), eig.max())
}

/// Maximal runs of lattice cells `[kT, (k+1)T]`, `k0 ≤ k < k1`, that are
/// homogeneous in the same subdomain, as `(first, last)` lattice indices.
pub fn homogeneous_runs(
    dom: &dibsi::domain::SubdomainSet<f64>,
    step: f64,
    k0: i64,
    k1: i64,
) -> Vec<(i64, i64, usize)> {
    let mut runs: Vec<(i64, i64, usize)> = Vec::new();
    for k in k0..k1 {
        let cell = dom
            .is_homogeneous(k as f64 * step, (k + 1) as f64 * step, 1e-9)
            .unwrap();
        match (cell, runs.last_mut()) {
            (Some(j), Some(run)) if run.1 == k && run.2 == j => run.1 = k + 1,
            (Some(j), _) => runs.push((k, k + 1, j)),
            (None, _) => {}
        }
    }
    runs
}
