use crate::{Error, Result, Scalar};

/// Meyer auxiliary polynomial `ν(x) = x⁴(35 − 84x + 70x² − 20x³)` on `[0, 1]`.
pub fn meyer_aux<F: Scalar>(x: F) -> Result<F> {
    if !(x >= F::zero() && x <= F::one()) {
        return Err(Error::invalid(format!(
            "meyer_aux argument {x} outside [0, 1]"
        )));
    }
    Ok(nu(x))
}

#[inline]
fn nu<F: Scalar>(x: F) -> F {
    let x = x.max(F::zero()).min(F::one());
    let x2 = x * x;
    let poly = F::lit(35.0) - F::lit(84.0) * x + F::lit(70.0) * x2 - F::lit(20.0) * x2 * x;
    x2 * x2 * poly
}

/// A system of `K ≥ 2` Meyer-type kernels `m_1 … m_K` on `[L, U]`.
///
/// Adjacent kernels overlap over one cell of width `Δ = U/K` with a
/// `cos²`/`sin²` crossfade, non-adjacent kernels have disjoint supports, and
/// the kernels sum to one everywhere. The first kernel is flat on
/// `[L, Δ/2]`, the last on `(U − Δ/2, U]`.
///
/// Kernels are indexed from 1, as in the crossfade formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeyerSystem<F> {
    count: usize,
    lower: F,
    upper: F,
    width: F,
}

impl<F: Scalar> MeyerSystem<F> {
    /// Requires `K ≥ 2`, `L > 0` and `L < U/(2K)`.
    pub fn new(count: usize, lower: F, upper: F) -> Result<Self> {
        if count < 2 {
            return Err(Error::invalid(format!(
                "a Meyer system needs K ≥ 2 kernels, got {count}"
            )));
        }
        let k = F::from_usize(count).unwrap();
        if !(lower > F::zero()) || !(lower < upper / (F::lit(2.0) * k)) {
            return Err(Error::invalid(format!(
                "Meyer range needs 0 < L < U/(2K); got L = {lower}, U = {upper}, K = {count}"
            )));
        }
        Ok(Self {
            count,
            lower,
            upper,
            width: upper / k,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn lower(&self) -> F {
        self.lower
    }

    pub fn upper(&self) -> F {
        self.upper
    }

    /// Cell width `Δ = U/K`.
    pub fn width(&self) -> F {
        self.width
    }

    /// `m_k(x)` for `k ∈ 1..=K`.
    ///
    /// Below `L` the first kernel's flat part is continued and above `U` the
    /// last kernel's, so the system stays a partition of unity on the line.
    pub fn kernel(&self, k: usize, x: F) -> Result<F> {
        if k == 0 || k > self.count {
            return Err(Error::invalid(format!(
                "kernel index {k} outside 1..={}",
                self.count
            )));
        }
        Ok(self.kernel_unchecked(k, x))
    }

    fn kernel_unchecked(&self, k: usize, x: F) -> F {
        let half_pi = F::FRAC_PI_2();
        let half = F::lit(0.5);
        let t = x / self.width;
        let kf = F::from_usize(k).unwrap();
        // Rising edge on (k − 3/2, k − 1/2], falling edge on (k − 1/2, k + 1/2].
        let rise_lo = kf - F::lit(1.5);
        let peak = kf - half;
        let fall_hi = kf + half;
        let falling = |arg: F| {
            let c = (half_pi * nu(arg)).cos();
            c * c
        };
        let rising = |arg: F| {
            let s = (half_pi * nu(arg)).sin();
            s * s
        };
        if k == 1 {
            if t <= peak {
                F::one()
            } else if t <= fall_hi {
                falling(t - half)
            } else {
                F::zero()
            }
        } else if k == self.count {
            if t <= rise_lo {
                F::zero()
            } else if t <= peak {
                rising(t - kf + F::lit(1.5))
            } else {
                F::one()
            }
        } else if t <= rise_lo || t > fall_hi {
            F::zero()
        } else if t <= peak {
            rising(t - kf + F::lit(1.5))
        } else {
            falling(t - kf + half)
        }
    }

    /// All kernel values at `x`; entry `k − 1` holds `m_k(x)`.
    pub fn eval_all(&self, x: F) -> Vec<F> {
        (1..=self.count)
            .map(|k| self.kernel_unchecked(k, x))
            .collect()
    }
}
