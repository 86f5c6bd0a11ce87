use super::{DiBasis, GeneratingBasis};
use crate::splines::{bspline_eval, half_support};
use crate::Scalar;

/// Quadrature spacing, in kernel coordinates, for coherence inner products.
pub const COHERENCE_QUAD_STEP: f64 = 1e-3;

impl<F: Scalar> DiBasis<F> {
    /// Domain similarity `ξ_k(x) = Θ(1 − (1/J) Σ_j |d_j((x + k)T) − d_j(kT)|)`
    /// for `|x| < Δ(n)`, else 0.
    pub fn domain_similarity(&self, k: i64, x: F) -> F {
        if x.abs() >= half_support(self.order()) {
            return F::zero();
        }
        let dom = self.domain();
        let here = dom.eval_all(F::from_index(k) * self.step());
        let there = dom.eval_all((x + F::from_index(k)) * self.step());
        let diff = here
            .iter()
            .zip(&there)
            .fold(F::zero(), |acc, (&a, &b)| acc + (a - b).abs());
        let j = F::from_usize(dom.count()).unwrap();
        self.shaping().apply(F::one() - diff / j)
    }

    /// Domain-basis coherence factor
    /// `R = Σ_k ⟨ξ_k, φ_k⟩ / Σ_k ⟨ξ_k, β⁽ⁿ⁾⟩` over the sample range, with
    /// trapezoidal inner products at spacing 1e−3 over each kernel's support.
    pub fn coherence_factor(&self) -> F {
        let order = self.order();
        let t = self.step();
        let delta = half_support::<F>(order);
        // 2Δ is a multiple of 1/2, so every support holds a whole number of
        // cells and neighboring kernels share quadrature nodes.
        let per_unit = (F::one() / F::lit(COHERENCE_QUAD_STEP))
            .round()
            .to_i64()
            .unwrap();
        let cells = (F::lit(2.0) * delta).to_i64().unwrap() * per_unit;
        let h = F::one() / F::from_index(per_unit);
        let (k_min, k_max) = self.sample_range();
        let dom = self.domain();
        let j = F::from_usize(dom.count()).unwrap();
        let centers: Vec<_> = (k_min..=k_max)
            .map(|k| dom.eval_all(F::from_index(k) * t))
            .collect();
        let mut num = F::zero();
        let mut den = F::zero();
        let nodes = (k_max - k_min) * per_unit + cells;
        for i in 0..=nodes {
            // kernel coordinate of node i relative to the first kernel
            let x0 = -delta + F::from_index(i) * h;
            let u = x0 + F::from_index(k_min);
            let here = dom.eval_all(u * t);
            for (l, v) in self.kernels_at(u) {
                let local = i - (l - k_min) * per_unit;
                if l < k_min || l > k_max || local < 0 || local > cells {
                    continue;
                }
                let x = -delta + F::from_index(local) * h;
                let w = if local == 0 || local == cells {
                    h / F::lit(2.0)
                } else {
                    h
                };
                let center = &centers[(l - k_min) as usize];
                let diff = here
                    .iter()
                    .zip(center)
                    .fold(F::zero(), |acc, (&a, &b)| acc + (a - b).abs());
                let xi = if x.abs() < delta {
                    self.shaping().apply(F::one() - diff / j)
                } else {
                    F::zero()
                };
                num = num + w * xi * v;
                den = den + w * xi * bspline_eval(order, x);
            }
        }
        num / den
    }
}
