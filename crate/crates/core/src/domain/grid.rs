use crate::{Error, Result, Scalar};

/// Default fine-grid spacing for subdomain functions, in domain units.
pub const DEFAULT_GRID_STEP: f64 = 1e-3;

/// A real function on `[lo, hi]` stored as samples on a uniform grid.
///
/// Evaluation is piecewise linear between grid samples and clamps to the
/// boundary value outside `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<F> {
    lo: F,
    hi: F,
    step: F,
    values: Vec<F>,
}

/// Number of grid points `⌊(hi − lo)/step⌋ + 1`, tolerant to rounding of an
/// exact ratio.
pub(crate) fn grid_len<F: Scalar>(lo: F, hi: F, step: F) -> usize {
    let ratio = ((hi - lo) / step).as_f64();
    (ratio + 1e-9).floor() as usize + 1
}

impl<F: Scalar> GridFunction<F> {
    pub fn new(lo: F, hi: F, step: F, values: Vec<F>) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::invalid(format!(
                "grid requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(step > F::zero()) || !step.is_finite() {
            return Err(Error::invalid(format!(
                "grid step must be positive, got {step}"
            )));
        }
        let expected = grid_len(lo, hi, step);
        if values.len() != expected {
            return Err(Error::invalid(format!(
                "grid on [{lo}, {hi}] with step {step} needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("grid value {i} is not finite")));
        }
        Ok(Self {
            lo,
            hi,
            step,
            values,
        })
    }

    /// Samples `f` at every grid point of `[lo, hi]`.
    pub fn sample(lo: F, hi: F, step: F, f: impl Fn(F) -> F) -> Result<Self> {
        if !(lo < hi) || !(step > F::zero()) {
            return Err(Error::invalid("grid requires lo < hi and a positive step"));
        }
        let n = grid_len(lo, hi, step);
        let values = (0..n)
            .map(|i| f(lo + F::from_usize(i).unwrap() * step))
            .collect();
        Self::new(lo, hi, step, values)
    }

    pub fn constant(lo: F, hi: F, step: F, value: F) -> Result<Self> {
        Self::sample(lo, hi, step, |_| value)
    }

    pub fn lo(&self) -> F {
        self.lo
    }

    pub fn hi(&self) -> F {
        self.hi
    }

    pub fn step(&self) -> F {
        self.step
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn grid_point(&self, i: usize) -> F {
        self.lo + F::from_usize(i).unwrap() * self.step
    }

    /// Cell index and interpolation weight of `x`, clamped to the grid.
    #[inline]
    pub(crate) fn locate(&self, x: F) -> (usize, F) {
        let last = self.values.len() - 1;
        let t = (x - self.lo) / self.step;
        if !(t > F::zero()) {
            return (0, F::zero());
        }
        let cell = t.floor();
        let i = cell.to_usize().unwrap_or(usize::MAX);
        if i >= last {
            return (last, F::zero());
        }
        (i, t - cell)
    }

    #[inline]
    pub(crate) fn at(&self, (i, frac): (usize, F)) -> F {
        let v0 = self.values[i];
        if frac == F::zero() {
            v0
        } else {
            v0 + frac * (self.values[i + 1] - v0)
        }
    }

    /// Piecewise-linear value at `x`.
    #[inline]
    pub fn eval(&self, x: F) -> F {
        self.at(self.locate(x))
    }

    pub(crate) fn values_mut(&mut self) -> &mut [F] {
        &mut self.values
    }

    pub(crate) fn same_grid(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.step == other.step
    }
}
