use std::sync::Arc;

use smallvec::SmallVec;

use super::{GeneratingBasis, KernelValues, Shaping};
use crate::domain::SubdomainSet;
use crate::splines::{active_indices, bspline_eval, half_support, BsplineKernel};
use crate::{Error, Result, Scalar};

/// Below this, the sum of neighboring dominant kernels is treated as zero and
/// the residual weights fall back to the standard B-spline weights.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Subdomain values within this distance of the maximum count as maximal.
const TIE_TOL: f64 = 1e-12;

/// Subdomains maximally associated with a sample (`I_k`) and the rest (`R_k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominantSets {
    pub dominant: Vec<usize>,
    pub remaining: Vec<usize>,
}

/// Per-kernel quantities at one absolute point.
#[derive(Debug, Clone, Copy)]
struct Entry<F> {
    k: i64,
    dominant: F,
    weight: F,
    theta: F,
}

struct PointState<F> {
    entries: SmallVec<[Entry<F>; 12]>,
    omega: F,
}

impl<F: Scalar> PointState<F> {
    fn find(&self, k: i64) -> Option<&Entry<F>> {
        self.entries.iter().find(|e| e.k == k)
    }
}

/// Domain-informed B-spline basis of order `n` on the lattice `kT`.
///
/// Kernels are available for every integer `k`; subdomain functions are
/// clamp-extended beyond the domain. `sample_range` is the set of samples
/// the basis is built for and bounds the Gram and coherence computations.
#[derive(Debug, Clone)]
pub struct DiBasis<F> {
    domain: Arc<SubdomainSet<F>>,
    order: usize,
    step: F,
    shaping: Shaping<F>,
    k_min: i64,
    k_max: i64,
    cache_first: i64,
    dominant: Vec<u64>,
}

impl<F: Scalar> DiBasis<F> {
    /// Basis over every lattice point `kT` inside the domain's range.
    pub fn new(
        domain: Arc<SubdomainSet<F>>,
        order: usize,
        step: F,
        shaping: Shaping<F>,
    ) -> Result<Self> {
        if !(step > F::zero()) {
            return Err(Error::invalid(format!(
                "sampling step must be positive, got {step}"
            )));
        }
        let eps = F::lit(1e-9);
        let k_min = (domain.lo() / step - eps).ceil().to_i64().unwrap();
        let k_max = (domain.hi() / step + eps).floor().to_i64().unwrap();
        Self::with_sample_range(domain, order, step, shaping, k_min, k_max)
    }

    pub fn with_sample_range(
        domain: Arc<SubdomainSet<F>>,
        order: usize,
        step: F,
        shaping: Shaping<F>,
        k_min: i64,
        k_max: i64,
    ) -> Result<Self> {
        BsplineKernel::new(order)?;
        if !(step > F::zero()) {
            return Err(Error::invalid(format!(
                "sampling step must be positive, got {step}"
            )));
        }
        if k_max < k_min {
            return Err(Error::invalid(format!(
                "empty sample range [{k_min}, {k_max}]"
            )));
        }
        if domain.count() > 64 {
            return Err(Error::invalid("at most 64 subdomains are supported"));
        }
        let margin = order as i64 + 2;
        let cache_first = k_min - margin;
        let mut basis = Self {
            domain,
            order,
            step,
            shaping,
            k_min,
            k_max,
            cache_first,
            dominant: Vec::new(),
        };
        basis.dominant = (cache_first..=k_max + margin)
            .map(|k| basis.compute_mask(k))
            .collect();
        Ok(basis)
    }

    pub fn domain(&self) -> &Arc<SubdomainSet<F>> {
        &self.domain
    }

    pub fn shaping(&self) -> Shaping<F> {
        self.shaping
    }

    /// Inclusive sample index range `(k_min, k_max)`.
    pub fn sample_range(&self) -> (i64, i64) {
        (self.k_min, self.k_max)
    }

    fn compute_mask(&self, k: i64) -> u64 {
        let d = self.domain.eval_all(F::from_index(k) * self.step);
        let max = d.iter().fold(F::neg_infinity(), |m, &v| m.max(v));
        let tol = F::lit(TIE_TOL);
        d.iter()
            .enumerate()
            .filter(|(_, &v)| v >= max - tol)
            .fold(0u64, |m, (j, _)| m | (1 << j))
    }

    #[inline]
    fn dominant_mask(&self, k: i64) -> u64 {
        let idx = k - self.cache_first;
        if idx >= 0 && (idx as usize) < self.dominant.len() {
            self.dominant[idx as usize]
        } else {
            self.compute_mask(k)
        }
    }

    /// `I_k`: subdomains attaining `max_j d_j(kT)` (ties within 1e−12 all
    /// included), and `R_k`, the complement.
    pub fn dominant_index_set(&self, k: i64) -> DominantSets {
        let mask = self.dominant_mask(k);
        let (dominant, remaining) = (0..self.domain.count()).partition(|&j| mask & (1 << j) != 0);
        DominantSets {
            dominant,
            remaining,
        }
    }

    #[inline]
    fn in_support(&self, x: F) -> bool {
        x.abs() <= half_support(self.order)
    }

    /// `β_{k,j}(x) = d_j((x + k)T) β⁽ⁿ⁾(x)` inside the support, else 0.
    pub fn subdomain_informed_bspline(&self, k: i64, j: usize, x: F) -> F {
        if !self.in_support(x) {
            return F::zero();
        }
        self.domain.eval(j, (x + F::from_index(k)) * self.step) * bspline_eval(self.order, x)
    }

    /// Dominant kernel: `Σ_{i ∈ I_k} β_{k,i}(x)`.
    pub fn dominant_kernel(&self, k: i64, x: F) -> F {
        if !self.in_support(x) {
            return F::zero();
        }
        let mask = self.dominant_mask(k);
        let d = self.domain.eval_all((x + F::from_index(k)) * self.step);
        let share = d
            .iter()
            .enumerate()
            .filter(|(j, _)| mask & (1 << j) != 0)
            .fold(F::zero(), |acc, (_, &v)| acc + v);
        share * bspline_eval(self.order, x)
    }

    fn point_state(&self, u: F) -> PointState<F> {
        let d = self.domain.eval_all(u * self.step);
        let mut entries: SmallVec<[Entry<F>; 12]> = SmallVec::new();
        let mut betas: SmallVec<[F; 12]> = SmallVec::new();
        let mut covered = F::zero();
        for k in active_indices(self.order, u) {
            let beta = bspline_eval(self.order, u - F::from_index(k));
            let mask = self.dominant_mask(k);
            let share = d
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .fold(F::zero(), |acc, (_, &v)| acc + v);
            let dominant = share * beta;
            covered = covered + dominant;
            betas.push(beta);
            entries.push(Entry {
                k,
                dominant,
                weight: F::zero(),
                theta: F::zero(),
            });
        }
        let omega = (F::one() - covered).max(F::zero()).min(F::one());

        if covered >= F::lit(WEIGHT_FLOOR) {
            for e in entries.iter_mut() {
                e.weight = e.dominant / covered;
            }
        } else {
            let total = betas.iter().fold(F::zero(), |a, &b| a + b);
            for (e, &b) in entries.iter_mut().zip(&betas) {
                e.weight = if total > F::zero() {
                    b / total
                } else {
                    F::zero()
                };
            }
        }
        let mut shaped_total = F::zero();
        for e in entries.iter_mut() {
            e.theta = self.shaping.apply(e.weight);
            shaped_total = shaped_total + e.theta;
        }
        if shaped_total > F::zero() {
            for e in entries.iter_mut() {
                e.theta = e.theta / shaped_total;
            }
        }
        PointState { entries, omega }
    }

    /// Residual `Ω(x) = 1 − Σ_{l ∈ Δ_x} β̇_l(x/T − l)` at the absolute
    /// position `x`, clamped to `[0, 1]`.
    pub fn residual_function(&self, x_abs: F) -> F {
        self.point_state(x_abs / self.step).omega
    }

    /// Plain residual weight `w_k(x)`.
    pub fn weight_w(&self, k: i64, x: F) -> F {
        self.point_state(x + F::from_index(k))
            .find(k)
            .map_or(F::zero(), |e| e.weight)
    }

    /// Shaped, normalized residual weight `θ_k(x)`.
    pub fn theta_weight(&self, k: i64, x: F) -> F {
        self.point_state(x + F::from_index(k))
            .find(k)
            .map_or(F::zero(), |e| e.theta)
    }

    /// Domain-informed kernel `β_k(x) = β̇_k(x) + θ_k(x) Ω((x + k)T)`,
    /// zero for `|x| ≥ Δ(n)` (`n ≥ 1`).
    pub fn di_bspline_eval(&self, k: i64, x: F) -> F {
        let st = self.point_state(x + F::from_index(k));
        st.find(k)
            .map_or(F::zero(), |e| e.dominant + e.theta * st.omega)
    }
}

impl<F: Scalar> GeneratingBasis<F> for DiBasis<F> {
    fn order(&self) -> usize {
        self.order
    }

    fn step(&self) -> F {
        self.step
    }

    fn kernels_at(&self, u: F) -> KernelValues<F> {
        let st = self.point_state(u);
        st.entries
            .iter()
            .map(|e| (e.k, e.dominant + e.theta * st.omega))
            .collect()
    }

    fn kernel(&self, k: i64, x: F) -> F {
        self.di_bspline_eval(k, x)
    }
}
