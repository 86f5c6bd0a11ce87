//! Centered B-spline kernels and their index neighborhoods.
//!
//! `β⁽ⁿ⁾` is the centered B-spline of degree `n`, supported on
//! `[-Δ(n), Δ(n)]` with `Δ(n) = (n + 1) / 2`. Values come from the uniform
//! Cox–de Boor recurrence, which only ever adds nonnegative terms and so stays
//! accurate at every order we support.

use std::ops::Range;

use crate::Scalar;

/// Highest supported spline order.
pub const MAX_ORDER: usize = 9;

/// Half-width `Δ(n) = (n + 1) / 2` of the support of `β⁽ⁿ⁾`.
#[inline]
pub fn half_support<F: Scalar>(order: usize) -> F {
    F::from_usize(order + 1).unwrap() / F::lit(2.0)
}

/// Evaluates the centered B-spline `β⁽ⁿ⁾(x)`.
///
/// For `n = 0` the half value at `|x| = 1/2` is returned; for `n ≥ 1` the
/// kernel is continuous and vanishes at `|x| ≥ Δ(n)`.
pub fn bspline_eval<F: Scalar>(order: usize, x: F) -> F {
    let half = F::lit(0.5);
    if order == 0 {
        let ax = x.abs();
        return if ax < half {
            F::one()
        } else if ax == half {
            half
        } else {
            F::zero()
        };
    }
    // Shift to the cardinal spline on [0, n + 1]; folding onto the left half
    // makes the evaluation exactly even.
    let y = half_support::<F>(order) - x.abs();
    if y <= F::zero() || y >= F::from_usize(order + 1).unwrap() {
        return F::zero();
    }
    let cell = y.floor();
    let u = y - cell;
    let offset = cell.to_usize().unwrap();
    let mut vals = [F::zero(); MAX_ORDER + 2];
    uniform_basis(order, u, &mut vals);
    vals[offset]
}

/// Fills `out[s] = N_p(u + s)` for `s = 0..=p`, where `N_p` is the cardinal
/// B-spline of degree `p` supported on `[0, p + 1]` and `u ∈ [0, 1)`.
pub(crate) fn uniform_basis<F: Scalar>(order: usize, u: F, out: &mut [F]) {
    out[0] = F::one();
    for p in 1..=order {
        let pf = F::from_usize(p).unwrap();
        let mut s = p;
        loop {
            let sf = F::from_usize(s).unwrap();
            let left = if s < p { (u + sf) * out[s] } else { F::zero() };
            let right = if s > 0 {
                (pf + F::one() - u - sf) * out[s - 1]
            } else {
                F::zero()
            };
            out[s] = (left + right) / pf;
            if s == 0 {
                break;
            }
            s -= 1;
        }
    }
}

/// The index set `{ k ∈ ℤ : |x/T − k| < Δ(n) }`, in ascending order.
pub fn delta_neighborhood<F: Scalar>(order: usize, x: F, step: F) -> Range<i64> {
    strict_neighborhood(order, x / step)
}

/// Neighborhood in sample units (`u = x / T`), strict inequality.
pub(crate) fn strict_neighborhood<F: Scalar>(order: usize, u: F) -> Range<i64> {
    let delta = half_support::<F>(order);
    let lo = (u - delta).floor().to_i64().unwrap() + 1;
    let hi = (u + delta).ceil().to_i64().unwrap() - 1;
    lo..(hi + 1).max(lo)
}

/// Indices whose kernel can be nonzero at `u`.
///
/// Equal to [`delta_neighborhood`] for `n ≥ 1`. For `n = 0` the boundary
/// index is kept as well, since `β⁽⁰⁾` takes its half value there.
pub(crate) fn active_indices<F: Scalar>(order: usize, u: F) -> Range<i64> {
    if order == 0 {
        let half = F::lit(0.5);
        let lo = (u - half).ceil().to_i64().unwrap();
        let hi = (u + half).floor().to_i64().unwrap();
        lo..(hi + 1).max(lo)
    } else {
        strict_neighborhood(order, u)
    }
}

/// A centered B-spline kernel of fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BsplineKernel {
    order: usize,
}

impl BsplineKernel {
    pub fn new(order: usize) -> crate::Result<Self> {
        if order > MAX_ORDER {
            return Err(crate::Error::invalid(format!(
                "spline order {order} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn half_support<F: Scalar>(&self) -> F {
        half_support(self.order)
    }

    pub fn eval<F: Scalar>(&self, x: F) -> F {
        bspline_eval(self.order, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn box_half_value_at_edges() {
        assert_eq!(bspline_eval(0, 0.5), 0.5);
        assert_eq!(bspline_eval(0, -0.5), 0.5);
        assert_eq!(bspline_eval(0, 0.2), 1.0);
        assert_eq!(bspline_eval(0, 0.7), 0.0);
    }

    #[test]
    fn reference_values() {
        assert_eq!(bspline_eval(1, 0.0), 1.0);
        assert_eq!(bspline_eval(2, 1.5), 0.0);
        assert_eq!(bspline_eval(2, -1.5), 0.0);
        assert!((bspline_eval(3, 0.0f64) - 2.0 / 3.0).abs() < 1e-15);
        assert!((bspline_eval(3, 1.0f64) - 1.0 / 6.0).abs() < 1e-15);
        assert!((bspline_eval(2, 0.0f64) - 0.75).abs() < 1e-15);
        assert!((bspline_eval(2, 1.0f64) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        assert!((bspline_eval(3, 0.0f32) - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn neighborhood_examples() {
        assert_eq!(delta_neighborhood(3, 0.2, 1.0), -1..3);
        assert_eq!(delta_neighborhood(1, 0.0, 1.0), 0..1);
        // x/T = 1 and |1 - k| < 1 only for k = 1.
        assert_eq!(delta_neighborhood(1, 0.5, 0.5), 1..2);
        // Half-integer point for n = 0: strict inequality leaves nothing.
        assert!(delta_neighborhood(0, 0.5, 1.0).is_empty());
        assert_eq!(active_indices(0, 0.5), 0..2);
    }

    #[test]
    fn kernel_rejects_high_order() {
        assert!(BsplineKernel::new(10).is_err());
        let k = BsplineKernel::new(3).unwrap();
        assert_eq!(k.half_support::<f64>(), 2.0);
    }

    proptest! {
        #[test]
        fn support_symmetry_and_sign(n in 0usize..=9, x in -6.0f64..6.0) {
            let v = bspline_eval(n, x);
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v, bspline_eval(n, -x));
            if x.abs() >= half_support::<f64>(n) && n > 0 {
                prop_assert_eq!(v, 0.0);
            }
        }

        #[test]
        fn neighborhood_membership(n in 0usize..=9, x in -50.0f64..50.0, t in 0.05f64..3.0) {
            let hood = delta_neighborhood(n, x, t);
            let u = x / t;
            let delta = half_support::<f64>(n);
            for k in (u.floor() as i64 - 8)..=(u.ceil() as i64 + 8) {
                prop_assert_eq!(hood.contains(&k), (u - k as f64).abs() < delta);
            }
        }

        #[test]
        fn neighborhood_partition_of_unity(n in 1usize..=9, x in -50.0f64..50.0, t in 0.05f64..3.0) {
            let u = x / t;
            let sum: f64 = delta_neighborhood(n, x, t).map(|k| bspline_eval(n, u - k as f64)).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }
}
