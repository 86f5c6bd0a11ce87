//! Collocation-based interpolation with standard or domain-informed kernels.
//!
//! Finite sample sets are extended by mirror reflection about the first and
//! last samples, so the collocation system stays square with bandwidth
//! `⌊n/2⌋` on each side.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::dibasis::{DiBasis, GeneratingBasis, StandardBasis};
use crate::splines::BsplineKernel;
use crate::{Error, Result, Scalar};

/// Pivots smaller than this send the banded solve to the dense fallback.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Relative residual tolerance `‖Ac − s‖∞ / max|s|`.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Uniform samples `s[i]` taken at `(k_offset + i)·T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSequence<F> {
    values: Vec<F>,
    step: F,
    k_offset: i64,
}

impl<F: Scalar> SampleSequence<F> {
    pub fn new(values: Vec<F>, step: F, k_offset: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample sequence is empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        if !(step > F::zero() && step.is_finite()) {
            return Err(Error::invalid(format!(
                "sampling step must be positive, got {step}"
            )));
        }
        Ok(Self {
            values,
            step,
            k_offset,
        })
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn step(&self) -> F {
        self.step
    }

    pub fn k_offset(&self) -> i64 {
        self.k_offset
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Lattice index of the last sample.
    pub fn last_index(&self) -> i64 {
        self.k_offset + self.values.len() as i64 - 1
    }
}

/// Folds a local index onto `0..len` by whole-sample mirror reflection.
pub fn mirror_index(i: i64, len: usize) -> usize {
    if len <= 1 {
        return 0;
    }
    let period = 2 * (len as i64 - 1);
    let m = i.rem_euclid(period);
    if m < len as i64 {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// Square matrix with `band` nonzero diagonals on each side of the main one.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<F> {
    size: usize,
    band: usize,
    // row-major, `2·band + 1` entries per row; column `j` of row `i` lives
    // at offset `j + band − i`
    data: Vec<F>,
}

impl<F: Scalar> BandedMatrix<F> {
    pub fn zeros(size: usize, band: usize) -> Self {
        Self {
            size,
            band,
            data: vec![F::zero(); size * (2 * band + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn band(&self) -> usize {
        self.band
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        (i.abs_diff(j) <= self.band).then(|| i * (2 * self.band + 1) + j + self.band - i)
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.slot(i, j).map_or(F::zero(), |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, v: F) {
        let s = self.slot(i, j).expect("entry outside the band");
        self.data[s] = self.data[s] + v;
    }

    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        (0..self.size)
            .map(|i| {
                let lo = i.saturating_sub(self.band);
                let hi = (i + self.band).min(self.size - 1);
                (lo..=hi).fold(F::zero(), |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j).as_f64())
    }
}

/// Collocation matrix and right-hand side for one sample sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSystem<F> {
    pub matrix: BandedMatrix<F>,
    pub rhs: Vec<F>,
}

/// Row `i`: `Σ_l c[l] φ_{k₀+l}(i − l) = s[i]`, with out-of-range `l` folded
/// back into the sample range by mirror reflection.
pub fn assemble_collocation<F: Scalar, B: GeneratingBasis<F> + ?Sized>(
    basis: &B,
    samples: &SampleSequence<F>,
) -> Result<CollocationSystem<F>> {
    let order = basis.order();
    check_compatible(basis, samples)?;
    let size = samples.len();
    let mut matrix = BandedMatrix::zeros(size, order / 2);
    for i in 0..size {
        let k = samples.k_offset() + i as i64;
        for (l, v) in basis.kernels_at(F::from_index(k)) {
            if v != F::zero() {
                matrix.add(i, mirror_index(l - samples.k_offset(), size), v);
            }
        }
    }
    Ok(CollocationSystem {
        matrix,
        rhs: samples.values().to_vec(),
    })
}

fn check_compatible<F: Scalar, B: GeneratingBasis<F> + ?Sized>(
    basis: &B,
    samples: &SampleSequence<F>,
) -> Result<()> {
    let order = basis.order();
    BsplineKernel::new(order)?;
    if samples.len() < order + 1 {
        return Err(Error::InsufficientSamples {
            order,
            needed: order + 1,
            got: samples.len(),
        });
    }
    let (t, s) = (basis.step(), samples.step());
    if (t - s).abs() > F::lit(1e-12) * t.max(s) {
        return Err(Error::invalid(format!(
            "basis step {t} differs from sample step {s}"
        )));
    }
    Ok(())
}

/// Solves the collocation system: banded LU without pivoting, falling back
/// to a dense partially pivoted LU when a pivot drops below [`PIVOT_FLOOR`].
pub fn solve_coefficients<F: Scalar>(system: &CollocationSystem<F>) -> Result<Vec<F>> {
    let coeffs = match banded_lu_solve(&system.matrix, &system.rhs) {
        Ok(c) => c,
        Err(_) => dense_solve(&system.matrix, &system.rhs)?,
    };
    let ac = system.matrix.mul_vec(&coeffs);
    let residual = ac
        .iter()
        .zip(&system.rhs)
        .fold(0.0f64, |m, (&a, &s)| m.max((a - s).abs().as_f64()));
    let scale = system
        .rhs
        .iter()
        .fold(0.0f64, |m, s| m.max(s.abs().as_f64()));
    let tolerance = residual_tolerance::<F>() * scale;
    if !(residual <= tolerance) {
        return Err(Error::Residual {
            residual,
            tolerance,
        });
    }
    Ok(coeffs)
}

// Below f64 the fixed relative tolerance is out of reach; scale with ε.
fn residual_tolerance<F: Scalar>() -> f64 {
    RESIDUAL_TOL.max(1e3 * F::epsilon().as_f64())
}

#[allow(clippy::needless_range_loop)]
fn banded_lu_solve<F: Scalar>(m: &BandedMatrix<F>, rhs: &[F]) -> Result<Vec<F>> {
    let (n, b) = (m.size, m.band);
    let mut a = m.clone();
    let mut y = rhs.to_vec();
    for p in 0..n {
        let pivot = a.get(p, p);
        if !(pivot.abs().as_f64() >= PIVOT_FLOOR) {
            return Err(Error::Singular {
                index: p,
                magnitude: pivot.abs().as_f64(),
            });
        }
        for i in p + 1..=(p + b).min(n - 1) {
            let f = a.get(i, p) / pivot;
            if f == F::zero() {
                continue;
            }
            for j in p..=(p + b).min(n - 1) {
                let v = a.get(p, j);
                a.add(i, j, -f * v);
            }
            y[i] = y[i] - f * y[p];
        }
    }
    let mut x = vec![F::zero(); n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in i + 1..=(i + b).min(n - 1) {
            acc = acc - a.get(i, j) * x[j];
        }
        x[i] = acc / a.get(i, i);
    }
    Ok(x)
}

fn dense_solve<F: Scalar>(m: &BandedMatrix<F>, rhs: &[F]) -> Result<Vec<F>> {
    let lu = m.to_dense().lu();
    let u = lu.u();
    if let Some((index, magnitude)) = (0..m.size)
        .map(|i| (i, u[(i, i)].abs()))
        .find(|&(_, v)| !(v >= PIVOT_FLOOR))
    {
        return Err(Error::Singular { index, magnitude });
    }
    let b = DVector::from_iterator(rhs.len(), rhs.iter().map(|v| v.as_f64()));
    let x = lu.solve(&b).ok_or(Error::Singular {
        index: 0,
        magnitude: 0.0,
    })?;
    Ok(x.iter().map(|&v| F::lit(v)).collect())
}

/// How coefficients are continued outside the sample range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    #[default]
    Mirror,
}

/// `s̃(x) = Σ_k c[k] φ_k(x/T − k)`.
#[derive(Debug, Clone)]
pub struct Interpolant<F, B> {
    coeffs: Vec<F>,
    basis: B,
    k_offset: i64,
    boundary: BoundaryMode,
}

impl<F: Scalar, B: GeneratingBasis<F>> Interpolant<F, B> {
    /// Coefficients `c[i]` for lattice indices `k_offset + i`.
    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn basis(&self) -> &B {
        &self.basis
    }

    pub fn k_offset(&self) -> i64 {
        self.k_offset
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        self.boundary
    }

    /// Evaluable range: the samples plus one mirror image on each side.
    pub fn range(&self) -> (F, F) {
        let span = self.coeffs.len() as i64 - 1;
        let t = self.basis.step();
        (
            F::from_index(self.k_offset - span) * t,
            F::from_index(self.k_offset + 2 * span) * t,
        )
    }

    pub fn evaluate(&self, x: F) -> Result<F> {
        let (lo, hi) = self.range();
        let slack = F::lit(1e-9) * self.basis.step();
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::OutOfRange {
                x: x.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(self.evaluate_unchecked(x))
    }

    fn evaluate_unchecked(&self, x: F) -> F {
        let n = self.coeffs.len();
        self.basis
            .kernels_at(snap_to_lattice(x / self.basis.step()))
            .into_iter()
            .fold(F::zero(), |acc, (l, v)| {
                acc + v * self.coeffs[mirror_index(l - self.k_offset, n)]
            })
    }

    pub fn evaluate_many(&self, xs: &[F]) -> Result<Vec<F>> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }
}

/// Rounds `u` to the nearest integer when it is within rounding error of it.
///
/// Domain-informed kernels need not be continuous at the edges of their
/// support (the shaped residual weights do not vanish there for finite γ), so
/// `x = kT` must land exactly on `u = k` even when `kT / T` is off by an ulp.
pub fn snap_to_lattice<F: Scalar>(u: F) -> F {
    let r = u.round();
    let tol = F::lit(1e-9).max(F::lit(16.0) * F::epsilon() * u.abs());
    if (u - r).abs() <= tol {
        r
    } else {
        u
    }
}

/// Interpolates `samples` in the span of `basis`.
pub fn interpolate<F: Scalar, B: GeneratingBasis<F>>(
    basis: B,
    samples: &SampleSequence<F>,
) -> Result<Interpolant<F, B>> {
    let system = assemble_collocation(&basis, samples)?;
    let coeffs = solve_coefficients(&system)?;
    Ok(Interpolant {
        coeffs,
        basis,
        k_offset: samples.k_offset(),
        boundary: BoundaryMode::Mirror,
    })
}

/// Standard (shift-invariant) B-spline interpolation of order `n`.
pub fn interpolate_bsi<F: Scalar>(
    samples: &SampleSequence<F>,
    order: usize,
) -> Result<Interpolant<F, StandardBasis<F>>> {
    interpolate(StandardBasis::new(order, samples.step())?, samples)
}

/// Domain-informed B-spline interpolation.
pub fn interpolate_dibsi<F: Scalar>(
    samples: &SampleSequence<F>,
    basis: Arc<DiBasis<F>>,
) -> Result<Interpolant<F, Arc<DiBasis<F>>>> {
    interpolate(basis, samples)
}
