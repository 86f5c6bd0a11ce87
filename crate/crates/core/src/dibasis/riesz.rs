use nalgebra::DMatrix;

use super::GeneratingBasis;
use crate::splines::half_support;
use crate::{Error, Result, Scalar};

/// Extreme eigenvalues of a finite section of the Gram matrix, as estimates
/// of the lower and upper Riesz bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Builds `G[k, l] = ⟨φ_k(·/T − k), φ_l(·/T − l)⟩` for `k, l ∈ [k_min, k_max]`
/// by trapezoidal quadrature at spacing `quad_step` (absolute units) and
/// returns its smallest and largest eigenvalues.
///
/// `quad_step` may not exceed `T/10`.
pub fn riesz_bounds_estimate<F: Scalar, B: GeneratingBasis<F>>(
    basis: &B,
    k_min: i64,
    k_max: i64,
    quad_step: F,
) -> Result<RieszBounds> {
    let t = basis.step();
    if !(quad_step > F::zero()) || quad_step > t / F::lit(10.0) {
        return Err(Error::invalid(format!(
            "quadrature step {quad_step} must be positive and at most T/10 = {}",
            t / F::lit(10.0)
        )));
    }
    if k_max <= k_min {
        return Err(Error::invalid("the Gram matrix needs at least two samples"));
    }
    let size = (k_max - k_min + 1) as usize;
    let delta = half_support::<F>(basis.order());
    let a = (F::from_index(k_min) - delta) * t;
    let b = (F::from_index(k_max) + delta) * t;
    let cells = ((b - a) / quad_step).ceil().to_usize().unwrap();
    let h = (b - a) / F::from_usize(cells).unwrap();
    let mut gram = DMatrix::<f64>::zeros(size, size);
    for i in 0..=cells {
        let x = a + F::from_usize(i).unwrap() * h;
        let w = if i == 0 || i == cells {
            h.as_f64() / 2.0
        } else {
            h.as_f64()
        };
        let vals: Vec<(usize, f64)> = basis
            .kernels_at(x / t)
            .into_iter()
            .filter(|&(k, _)| k >= k_min && k <= k_max)
            .map(|(k, v)| ((k - k_min) as usize, v.as_f64()))
            .collect();
        for &(p, vp) in &vals {
            for &(q, vq) in &vals {
                gram[(p, q)] += w * vp * vq;
            }
        }
    }
    let eig = gram.symmetric_eigenvalues();
    let lower = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RieszBounds { lower, upper })
}

impl<F: Scalar> super::DiBasis<F> {
    /// Riesz bound estimates over this basis' sample range.
    pub fn riesz_bounds_estimate(&self, quad_step: F) -> Result<RieszBounds> {
        let (k_min, k_max) = self.sample_range();
        riesz_bounds_estimate(self, k_min, k_max, quad_step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dibasis::StandardBasis;

    #[test]
    fn linear_standard_gram_matches_tridiagonal_eigenvalues() {
        let basis = StandardBasis::new(1, 1.0).unwrap();
        let n = 20;
        let bounds = riesz_bounds_estimate(&basis, 0, n - 1, 1e-3).unwrap();
        // Tridiagonal (1/6, 2/3, 1/6): λ_j = 2/3 + (1/3) cos(jπ/(N + 1)).
        let lam = |j: i64| {
            2.0 / 3.0 + (1.0 / 3.0) * (j as f64 * std::f64::consts::PI / (n + 1) as f64).cos()
        };
        assert!((bounds.lower - lam(n)).abs() < 1e-5, "{bounds:?}");
        assert!((bounds.upper - lam(1)).abs() < 1e-5);
        assert!(bounds.lower > 0.0 && bounds.lower <= bounds.upper);
    }

    #[test]
    fn rejects_coarse_quadrature_and_single_sample() {
        let basis = StandardBasis::new(3, 1.0).unwrap();
        assert!(riesz_bounds_estimate(&basis, 0, 10, 0.2).is_err());
        assert!(riesz_bounds_estimate(&basis, 3, 3, 0.01).is_err());
    }
}
