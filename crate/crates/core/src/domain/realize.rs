use rand::seq::SliceRandom;
use rand::Rng;

use super::{GridFunction, MeyerSystem, SubdomainSet, DEFAULT_GRID_STEP};
use crate::{seed, Error, Result, Scalar};

/// Settings for [`realize_domain_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizeOptions {
    /// Grid spacing of the realized subdomain functions.
    pub grid_step: f64,
    /// Number of warp increments; `None` uses one per kernel.
    pub warp_knots: Option<usize>,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        Self {
            grid_step: DEFAULT_GRID_STEP,
            warp_knots: None,
        }
    }
}

/// Smallest warp increment, relative to the largest possible one.
const MIN_INCREMENT: f64 = 0.1;

/// A random, strictly increasing map `w: [lo, hi] → [lo, hi]` with
/// `w(lo) = lo` and `w(hi) = hi`.
///
/// `knots` positive increments are drawn, their cumulative sum is rescaled to
/// span `[lo, hi]` and the breakpoints (at equally spaced abscissae) are joined
/// linearly. The result is sampled on a grid of spacing `grid_step`.
pub fn random_warp<F: Scalar>(
    lo: F,
    hi: F,
    seed: u64,
    knots: usize,
    grid_step: F,
) -> Result<GridFunction<F>> {
    if !(lo < hi) {
        return Err(Error::invalid(format!(
            "warp range needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    if knots == 0 {
        return Err(Error::invalid("warp needs at least one increment"));
    }
    let mut rng = seed::rng(seed);
    let incs: Vec<f64> = (0..knots)
        .map(|_| rng.gen_range(MIN_INCREMENT..=1.0))
        .collect();
    let total: f64 = incs.iter().sum();
    let (lo64, hi64) = (lo.as_f64(), hi.as_f64());
    let span = hi64 - lo64;
    let mut breaks = Vec::with_capacity(knots + 1);
    let mut acc = 0.0;
    breaks.push(lo64);
    for inc in &incs[..knots - 1] {
        acc += inc;
        breaks.push(lo64 + span * acc / total);
    }
    breaks.push(hi64);
    let cell = span / knots as f64;
    GridFunction::sample(lo, hi, grid_step, |x| {
        let t = ((x.as_f64() - lo64) / cell).clamp(0.0, knots as f64);
        let i = (t.floor() as usize).min(knots - 1);
        let frac = t - i as f64;
        F::lit(breaks[i] + frac * (breaks[i + 1] - breaks[i]))
    })
}

/// Randomly splits kernels `1..=kernels` into `parts` nonempty disjoint sets:
/// the kernel indices are shuffled, then dealt round-robin.
pub fn assign_kernels<R: Rng>(kernels: usize, parts: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (1..=kernels).collect();
    order.shuffle(rng);
    let mut sets = vec![Vec::new(); parts];
    for (i, k) in order.into_iter().enumerate() {
        sets[i % parts].push(k);
    }
    for s in &mut sets {
        s.sort_unstable();
    }
    sets
}

/// Meyer system covering `[lo, hi]`, and the affine offset taking domain
/// coordinates into the system's coordinates.
fn system_for_range<F: Scalar>(kernels: usize, lo: F, hi: F) -> Result<(MeyerSystem<F>, F)> {
    let k = F::from_usize(kernels).unwrap();
    if lo > F::zero() && lo < hi / (F::lit(2.0) * k) {
        return Ok((MeyerSystem::new(kernels, lo, hi)?, F::zero()));
    }
    // Shift so the lower end sits at L = (hi − lo)/(4K − 1), which keeps
    // L < U/(2K) for U = hi − lo + L.
    let lower = (hi - lo) / (F::lit(4.0) * k - F::one());
    let sys = MeyerSystem::new(kernels, lower, hi - lo + lower)?;
    Ok((sys, lower - lo))
}

/// Builds `d_j(x) = Σ_{k ∈ K_j} m_k(w(x))` on a grid over `[lo, hi]` and
/// renormalizes pointwise. Without a warp, `w` is the identity.
pub fn subdomains_from_kernels<F: Scalar>(
    system: &MeyerSystem<F>,
    assignment: &[Vec<usize>],
    warp: Option<&GridFunction<F>>,
    offset: F,
    lo: F,
    hi: F,
    grid_step: F,
) -> Result<SubdomainSet<F>> {
    let mut owner = vec![usize::MAX; system.count()];
    for (j, set) in assignment.iter().enumerate() {
        for &k in set {
            if k == 0 || k > system.count() || owner[k - 1] != usize::MAX {
                return Err(Error::invalid(format!(
                    "kernel {k} is out of range or assigned twice"
                )));
            }
            owner[k - 1] = j;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::invalid(
            "every kernel must be assigned to a subdomain",
        ));
    }
    let n = super::grid::grid_len(lo, hi, grid_step);
    let mut columns = vec![Vec::with_capacity(n); assignment.len()];
    for i in 0..n {
        let x = lo + F::from_usize(i).unwrap() * grid_step;
        let y = warp.map_or(x, |w| w.eval(x)) + offset;
        let kern = system.eval_all(y);
        for col in columns.iter_mut() {
            col.push(F::zero());
        }
        for (k, v) in kern.into_iter().enumerate() {
            let col = &mut columns[owner[k]];
            let last = col.len() - 1;
            col[last] = col[last] + v;
        }
    }
    let functions = columns
        .into_iter()
        .map(|vals| GridFunction::new(lo, hi, grid_step, vals))
        .collect::<Result<Vec<_>>>()?;
    SubdomainSet::renormalized(functions, 1e-6)
}

/// Realizes a random domain of `subdomains` parts from `kernels` warped
/// Meyer-type kernels on `[lo, hi]`, with default options.
pub fn realize_domain<F: Scalar>(
    subdomains: usize,
    kernels: usize,
    lo: F,
    hi: F,
    seed: u64,
) -> Result<SubdomainSet<F>> {
    realize_domain_with(
        subdomains,
        kernels,
        lo,
        hi,
        seed,
        &RealizeOptions::default(),
    )
}

/// Realizes a random domain: build a Meyer system over `[lo, hi]`, warp it by
/// [`random_warp`], deal the kernels to subdomains with [`assign_kernels`] and
/// sum within each subdomain. Deterministic in `seed`.
pub fn realize_domain_with<F: Scalar>(
    subdomains: usize,
    kernels: usize,
    lo: F,
    hi: F,
    seed: u64,
    opts: &RealizeOptions,
) -> Result<SubdomainSet<F>> {
    if subdomains == 0 {
        return Err(Error::invalid("at least one subdomain is required"));
    }
    if kernels < subdomains {
        return Err(Error::invalid(format!(
            "need at least as many kernels as subdomains (K = {kernels} < J = {subdomains})"
        )));
    }
    let step = F::lit(opts.grid_step);
    if kernels < 2 {
        // One kernel, one subdomain: the whole range is homogeneous.
        return SubdomainSet::homogeneous(lo, hi, step);
    }
    let (system, offset) = system_for_range(kernels, lo, hi)?;
    let warp = random_warp(
        lo,
        hi,
        seed::derive_seed(seed, &[0]),
        opts.warp_knots.unwrap_or(kernels),
        step,
    )?;
    let mut rng = seed::rng(seed::derive_seed(seed, &[1]));
    let assignment = assign_kernels(kernels, subdomains, &mut rng);
    subdomains_from_kernels(&system, &assignment, Some(&warp), offset, lo, hi, step)
}
