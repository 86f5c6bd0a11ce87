//! Domain-informed B-spline generating bases.
//!
//! A [`DiBasis`] tailors each shifted B-spline `β⁽ⁿ⁾(· − k)` to the domain
//! around sample `k`: the part of the kernel attributed to the subdomains that
//! dominate at `kT` is kept (the dominant kernel), and whatever the dominant
//! kernels of all neighbors leave uncovered (the residual `Ω`) is handed back
//! to the neighbors through logistic-shaped weights. The resulting family
//! still sums to one everywhere and coincides with the standard kernels on
//! homogeneous stretches.

mod basis;
mod coherence;
mod riesz;

use smallvec::SmallVec;

pub use basis::{DiBasis, DominantSets, WEIGHT_FLOOR};
pub use riesz::{riesz_bounds_estimate, RieszBounds};

use crate::splines::{active_indices, bspline_eval, half_support};
use crate::{Error, Result, Scalar};

/// Default logistic sharpness `γ`.
pub const DEFAULT_GAMMA: f64 = 10.0;

/// `(k, φ_k(u − k))` for every kernel that can be nonzero at a point `u`.
pub type KernelValues<F> = SmallVec<[(i64, F); 12]>;

/// A family of compactly supported kernels `{φ_k(x/T − k)}` on a uniform
/// sample lattice of step `T`.
pub trait GeneratingBasis<F: Scalar>: Send + Sync {
    fn order(&self) -> usize;

    /// Sampling step `T`.
    fn step(&self) -> F;

    /// All kernels active at the point `x = uT`, as `(k, φ_k(u − k))`, in
    /// ascending `k`.
    fn kernels_at(&self, u: F) -> KernelValues<F>;

    /// `φ_k(x)` in kernel coordinates.
    fn kernel(&self, k: i64, x: F) -> F {
        self.kernels_at(x + F::from_index(k))
            .into_iter()
            .find(|&(l, _)| l == k)
            .map_or(F::zero(), |(_, v)| v)
    }
}

impl<F: Scalar, B: GeneratingBasis<F> + ?Sized> GeneratingBasis<F> for std::sync::Arc<B> {
    fn order(&self) -> usize {
        (**self).order()
    }
    fn step(&self) -> F {
        (**self).step()
    }
    fn kernels_at(&self, u: F) -> KernelValues<F> {
        (**self).kernels_at(u)
    }
    fn kernel(&self, k: i64, x: F) -> F {
        (**self).kernel(k, x)
    }
}

/// The shift-invariant basis `{β⁽ⁿ⁾(x/T − k)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardBasis<F> {
    order: usize,
    step: F,
}

impl<F: Scalar> StandardBasis<F> {
    pub fn new(order: usize, step: F) -> Result<Self> {
        crate::splines::BsplineKernel::new(order)?;
        if !(step > F::zero()) {
            return Err(Error::invalid(format!(
                "sampling step must be positive, got {step}"
            )));
        }
        Ok(Self { order, step })
    }
}

impl<F: Scalar> GeneratingBasis<F> for StandardBasis<F> {
    fn order(&self) -> usize {
        self.order
    }

    fn step(&self) -> F {
        self.step
    }

    fn kernels_at(&self, u: F) -> KernelValues<F> {
        active_indices(self.order, u)
            .map(|k| (k, bspline_eval(self.order, u - F::from_index(k))))
            .collect()
    }

    fn kernel(&self, _k: i64, x: F) -> F {
        if self.order > 0 && x.abs() >= half_support(self.order) {
            return F::zero();
        }
        bspline_eval(self.order, x)
    }
}

/// The monotone map `Θ: [0, 1] → [0, 1]` applied to the residual weights and
/// to the domain similarity metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shaping<F> {
    /// `Θ(x) = x`; the residual weights are then the plain weights `w_k`.
    Identity,
    /// `Θ(x) = (1 + e^{−γ/2}) / (1 + e^{−γ(x − 1/2)})`, `γ ≥ 1`.
    Logistic { gamma: F },
}

impl<F: Scalar> Shaping<F> {
    pub fn logistic(gamma: F) -> Result<Self> {
        if !(gamma >= F::one()) || !gamma.is_finite() {
            return Err(Error::invalid(format!(
                "logistic shaping needs finite γ ≥ 1, got {gamma}"
            )));
        }
        Ok(Shaping::Logistic { gamma })
    }

    #[inline]
    pub fn apply(&self, x: F) -> F {
        match *self {
            Shaping::Identity => x,
            Shaping::Logistic { gamma } => logistic(x, gamma),
        }
    }
}

impl<F: Scalar> Default for Shaping<F> {
    fn default() -> Self {
        Shaping::Logistic {
            gamma: F::lit(DEFAULT_GAMMA),
        }
    }
}

#[inline]
fn logistic<F: Scalar>(x: F, gamma: F) -> F {
    let half = F::lit(0.5);
    (F::one() + (-gamma * half).exp()) / (F::one() + (-gamma * (x - half)).exp())
}

/// `Θ(x) = (1 + e^{−γ/2}) / (1 + e^{−γ(x − 1/2)})` for `x ∈ [0, 1]`, `γ ≥ 1`.
///
/// `Θ(1) = 1` exactly, but for finite `γ` neither `Θ(0) = 0` nor
/// `Θ(1/2) = 1/2` holds; the map is used as written.
pub fn theta_shape<F: Scalar>(x: F, gamma: F) -> Result<F> {
    if !(x >= F::zero() && x <= F::one()) {
        return Err(Error::invalid(format!("Θ argument {x} outside [0, 1]")));
    }
    Shaping::logistic(gamma)?;
    Ok(logistic(x, gamma))
}
