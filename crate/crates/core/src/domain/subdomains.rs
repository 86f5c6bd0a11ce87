use smallvec::SmallVec;

use super::GridFunction;
use crate::{Error, Result, Scalar};

/// Pointwise tolerance on `Σ_j d_j = 1` at grid points.
pub const PARTITION_TOL: f64 = 1e-9;

/// Default tolerance for [`SubdomainSet::is_homogeneous`].
pub const DEFAULT_HOMOGENEITY_TOL: f64 = 1e-9;

/// Values of all subdomain functions at one point.
pub type SubdomainValues<F> = SmallVec<[F; 8]>;

/// `J` nonnegative subdomain functions on a common grid that sum to one
/// pointwise: the description of an inhomogeneous domain.
///
/// Subdomains are indexed from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainSet<F> {
    functions: Vec<GridFunction<F>>,
}

impl<F: Scalar> SubdomainSet<F> {
    /// Validates nonnegativity and the partition of unity at every grid
    /// point (within [`PARTITION_TOL`]).
    pub fn new(functions: Vec<GridFunction<F>>) -> Result<Self> {
        Self::check_shape(&functions)?;
        let set = Self { functions };
        let (worst, at) = set.max_partition_defect();
        if worst > PARTITION_TOL {
            return Err(Error::InvalidDomain(format!(
                "subdomain functions sum to 1 ± {worst:e} at grid point {at}, tolerance {PARTITION_TOL:e}"
            )));
        }
        Ok(set)
    }

    /// Accepts functions whose pointwise sum deviates from one by less than
    /// `tol` and divides each by the pointwise sum; larger deviations are
    /// rejected.
    pub fn renormalized(functions: Vec<GridFunction<F>>, tol: f64) -> Result<Self> {
        Self::check_shape(&functions)?;
        let mut set = Self { functions };
        let (worst, at) = set.max_partition_defect();
        if !(worst < tol) {
            return Err(Error::InvalidDomain(format!(
                "subdomain functions sum to 1 ± {worst:e} at grid point {at}, beyond {tol:e}"
            )));
        }
        set.normalize_in_place();
        Ok(set)
    }

    /// A single subdomain covering `[lo, hi]`.
    pub fn homogeneous(lo: F, hi: F, step: F) -> Result<Self> {
        Self::new(vec![GridFunction::constant(lo, hi, step, F::one())?])
    }

    fn check_shape(functions: &[GridFunction<F>]) -> Result<()> {
        let first = functions
            .first()
            .ok_or_else(|| Error::InvalidDomain("at least one subdomain is required".into()))?;
        if functions.iter().any(|f| !f.same_grid(first)) {
            return Err(Error::InvalidDomain(
                "subdomain functions must share one grid".into(),
            ));
        }
        for (j, f) in functions.iter().enumerate() {
            if let Some(i) = f.values().iter().position(|&v| v < F::zero()) {
                return Err(Error::InvalidDomain(format!(
                    "subdomain {j} is negative at grid point {i}"
                )));
            }
        }
        Ok(())
    }

    fn max_partition_defect(&self) -> (f64, usize) {
        let n = self.functions[0].len();
        (0..n)
            .map(|i| {
                let s = self
                    .functions
                    .iter()
                    .fold(F::zero(), |acc, f| acc + f.values()[i]);
                ((s - F::one()).abs().as_f64(), i)
            })
            .fold(
                (0.0, 0),
                |best, cur| if cur.0 > best.0 { cur } else { best },
            )
    }

    /// Divides every function by the pointwise sum of all functions.
    pub(crate) fn normalize_in_place(&mut self) {
        let n = self.functions[0].len();
        for i in 0..n {
            let s = self
                .functions
                .iter()
                .fold(F::zero(), |acc, f| acc + f.values()[i]);
            if s > F::zero() {
                for f in &mut self.functions {
                    let v = &mut f.values_mut()[i];
                    *v = *v / s;
                }
            }
        }
    }

    /// Number of subdomains `J`.
    pub fn count(&self) -> usize {
        self.functions.len()
    }

    pub fn functions(&self) -> &[GridFunction<F>] {
        &self.functions
    }

    pub fn function(&self, j: usize) -> &GridFunction<F> {
        &self.functions[j]
    }

    pub fn lo(&self) -> F {
        self.functions[0].lo()
    }

    pub fn hi(&self) -> F {
        self.functions[0].hi()
    }

    pub fn step(&self) -> F {
        self.functions[0].step()
    }

    pub fn grid_len(&self) -> usize {
        self.functions[0].len()
    }

    /// `d_j(x)`.
    #[inline]
    pub fn eval(&self, j: usize, x: F) -> F {
        self.functions[j].eval(x)
    }

    /// All `d_j(x)` at once; the grid lookup is shared.
    #[inline]
    pub fn eval_all(&self, x: F) -> SubdomainValues<F> {
        let loc = self.functions[0].locate(x);
        self.functions.iter().map(|f| f.at(loc)).collect()
    }

    /// Tests whether `[a, b]` is homogeneous: some subdomain `l` has
    /// `d_l ≥ 1 − tol` at every grid point in `[a, b]` (and at `a` and `b`
    /// themselves). Returns that `l`.
    pub fn is_homogeneous(&self, a: F, b: F, tol: F) -> Result<Option<usize>> {
        if !(a <= b) {
            return Err(Error::invalid(format!("empty interval [{a}, {b}]")));
        }
        let thresh = F::one() - tol;
        let g = &self.functions[0];
        let upper = (g.len() - 1) as f64;
        let first = ((a - g.lo()) / g.step()).ceil().as_f64().max(0.0);
        let last = ((b - g.lo()) / g.step()).floor().as_f64().min(upper);
        let interior = (first <= last).then_some(first as usize..=last as usize);
        let candidate = |l: usize| -> bool {
            let f = &self.functions[l];
            f.eval(a) >= thresh
                && f.eval(b) >= thresh
                && interior
                    .clone()
                    .is_none_or(|r| f.values()[r].iter().all(|&v| v >= thresh))
        };
        Ok((0..self.count()).find(|&l| candidate(l)))
    }
}
