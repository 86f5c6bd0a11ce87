use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::domain::SubdomainSet;
use crate::interp::SampleSequence;
use crate::splines::MAX_ORDER;
use crate::{seed, Error, Result};

/// Default knot jitter `α`.
pub const DEFAULT_JITTER: f64 = 0.25;

/// Gates within this distance of `1/J` count as ties.
const GATE_TIE_TOL: f64 = 1e-12;

/// Degree-`n` spline on a non-uniform knot sequence interpolating values at
/// given sites.
///
/// Odd degrees place the breakpoints at the sites, even degrees at the
/// midpoints between consecutive sites; each basis function is centered on
/// one site, which keeps the collocation matrix banded and nonsingular.
#[derive(Debug, Clone)]
pub struct NonUniformSpline {
    degree: usize,
    breaks: Vec<f64>,
    // basis `first_basis + i` carries `coeffs[i]`
    first_basis: usize,
    coeffs: Vec<f64>,
}

impl NonUniformSpline {
    /// Interpolates `values[i]` at `sites[first + i]`. `sites` must be
    /// strictly increasing and extend at least `degree/2 + 1` entries past
    /// the interpolated ones on each side.
    pub fn interpolate(degree: usize, sites: &[f64], first: usize, values: &[f64]) -> Result<Self> {
        if degree > MAX_ORDER {
            return Err(Error::invalid(format!(
                "spline degree {degree} exceeds {MAX_ORDER}"
            )));
        }
        if sites.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("spline sites must be strictly increasing"));
        }
        let half = degree / 2 + 1;
        if first < half || first + values.len() + half > sites.len() {
            return Err(Error::invalid(
                "not enough padding sites around the interpolation sites",
            ));
        }
        let (breaks, lead) = if degree % 2 == 1 {
            (sites.to_vec(), degree.div_ceil(2))
        } else {
            (
                sites.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
                degree / 2 + 1,
            )
        };
        let first_basis = first - lead;
        let n = values.len();
        let mut spline = Self {
            degree,
            breaks,
            first_basis,
            coeffs: vec![0.0; n],
        };
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for (m, v) in spline.basis_at(sites[first + i]) {
                if m >= first_basis && m < first_basis + n {
                    a[(i, m - first_basis)] = v;
                }
            }
        }
        let c = a
            .lu()
            .solve(&DVector::from_column_slice(values))
            .ok_or(Error::Singular {
                index: 0,
                magnitude: 0.0,
            })?;
        spline.coeffs = c.iter().copied().collect();
        Ok(spline)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nonzero basis functions `(m, B_m(x))` on the breakpoint sequence.
    fn basis_at(&self, x: f64) -> Vec<(usize, f64)> {
        let p = self.degree;
        let t = &self.breaks;
        if t.len() < 2 * p + 2 || x < t[p] || x > t[t.len() - 1 - p] {
            return Vec::new();
        }
        // span s with t[s] ≤ x < t[s + 1], clamped so the right end belongs
        // to the last span
        let s = (t.partition_point(|&b| b <= x) - 1).min(t.len() - 2 - p);
        let mut n = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        n[0] = 1.0;
        for j in 1..=p {
            left[j] = x - t[s + 1 - j];
            right[j] = t[s + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let tmp = n[r] / (right[r + 1] + left[j - r]);
                n[r] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            n[j] = saved;
        }
        (0..=p).map(|r| (s - p + r, n[r])).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let end = self.first_basis + self.coeffs.len();
        self.basis_at(x)
            .into_iter()
            .filter(|&(m, _)| m >= self.first_basis && m < end)
            .map(|(m, v)| v * self.coeffs[m - self.first_basis])
            .sum()
    }
}

/// `s(x) = Σ_j H(d_j(x) − 1/J) f_j(x)`: one random spline per subdomain, each
/// visible only where its subdomain holds more than an equal share.
#[derive(Debug, Clone)]
pub struct SyntheticSignal {
    domain: Arc<SubdomainSet<f64>>,
    order: usize,
    first_knot: i64,
    knots: Vec<f64>,
    controls: Vec<Vec<f64>>,
    components: Vec<NonUniformSpline>,
}

/// Draws jittered knots `t[k] = k + ε_k`, `ε_k ~ U[−α, α]`, and control
/// values `v_j[k] ~ U[0, 1]`, and interpolates each `v_j` by an order-`n`
/// spline on the knots.
///
/// The number of knots drawn depends only on the domain range, not on `n`,
/// so every order sees the same random draws; interpolation uses the knots
/// within `n + 3` of the domain and the rest serve as breakpoint padding.
pub fn realize_signal(
    dom: Arc<SubdomainSet<f64>>,
    order: usize,
    alpha: f64,
    seed: u64,
) -> Result<SyntheticSignal> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::invalid(format!(
            "jitter must lie in [0, 0.5), got {alpha}"
        )));
    }
    if order > MAX_ORDER {
        return Err(Error::invalid(format!("order {order} exceeds {MAX_ORDER}")));
    }
    let pad = 2 * MAX_ORDER as i64 + 4;
    let first_knot = dom.lo().floor() as i64 - pad;
    let last_knot = dom.hi().ceil() as i64 + pad;
    let count = (last_knot - first_knot + 1) as usize;
    let mut rng = seed::rng(seed);
    let knots: Vec<f64> = (0..count)
        .map(|i| {
            (first_knot + i as i64) as f64
                + if alpha > 0.0 {
                    rng.gen_range(-alpha..=alpha)
                } else {
                    0.0
                }
        })
        .collect();
    let controls: Vec<Vec<f64>> = (0..dom.count())
        .map(|_| (0..count).map(|_| rng.gen_range(0.0..=1.0)).collect())
        .collect();
    let inner = (pad - (order as i64 + 3)) as usize;
    let used = count - 2 * inner;
    let components = controls
        .iter()
        .map(|v| NonUniformSpline::interpolate(order, &knots, inner, &v[inner..inner + used]))
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticSignal {
        domain: dom,
        order,
        first_knot,
        knots,
        controls,
        components,
    })
}

impl SyntheticSignal {
    pub fn domain(&self) -> &Arc<SubdomainSet<f64>> {
        &self.domain
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `(k, t[k])` for every drawn knot.
    pub fn knots(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.knots
            .iter()
            .enumerate()
            .map(|(i, &t)| (self.first_knot + i as i64, t))
    }

    /// Control value `v_j[k]`.
    pub fn control(&self, j: usize, k: i64) -> f64 {
        self.controls[j][(k - self.first_knot) as usize]
    }

    /// `f_j(x)`.
    pub fn component(&self, j: usize, x: f64) -> f64 {
        self.components[j].eval(x)
    }

    /// Indices of the open gates at `x`: every `j` with `d_j(x) > 1/J`, or,
    /// when none clears `1/J` strictly, the smallest `j` tied with it.
    pub fn open_gates(&self, x: f64) -> smallvec::SmallVec<[usize; 4]> {
        let d = self.domain.eval_all(x);
        let share = 1.0 / d.len() as f64;
        let open: smallvec::SmallVec<[usize; 4]> = (0..d.len())
            .filter(|&j| d[j] - share > GATE_TIE_TOL)
            .collect();
        if !open.is_empty() {
            return open;
        }
        (0..d.len())
            .find(|&j| (d[j] - share).abs() <= GATE_TIE_TOL)
            .into_iter()
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.open_gates(x)
            .into_iter()
            .map(|j| self.components[j].eval(x))
            .sum()
    }
}

/// `s[k] = s(kT)` for every lattice point `kT` in `[lo, hi]`.
pub fn sample_signal(
    sig: &SyntheticSignal,
    step: f64,
    lo: f64,
    hi: f64,
) -> Result<SampleSequence<f64>> {
    if !(step > 0.0) {
        return Err(Error::invalid(format!(
            "sampling step must be positive, got {step}"
        )));
    }
    let k0 = (lo / step - 1e-9).ceil() as i64;
    let k1 = (hi / step + 1e-9).floor() as i64;
    if k1 < k0 {
        return Err(Error::invalid(format!(
            "no lattice point of step {step} in [{lo}, {hi}]"
        )));
    }
    let values = (k0..=k1).map(|k| sig.eval(k as f64 * step)).collect();
    SampleSequence::new(values, step, k0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{realize_domain, GridFunction};

    fn domain(seed: u64) -> Arc<SubdomainSet<f64>> {
        Arc::new(realize_domain(2, 9, 1.0, 30.0, seed).unwrap())
    }

    #[test]
    fn components_interpolate_controls_at_knots() {
        for order in 0..=7 {
            let sig = realize_signal(domain(1), order, 0.25, 7).unwrap();
            for (k, t) in sig.knots().filter(|&(k, _)| (-2..=33).contains(&k)) {
                for j in 0..2 {
                    assert!(
                        (sig.component(j, t) - sig.control(j, k)).abs() < 1e-9,
                        "n {order} k {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn spline_reproduces_polynomials_of_its_degree() {
        let sites: Vec<f64> = (0..120)
            .map(|i| i as f64 + 0.2 * ((i * 7 % 5) as f64 - 2.0) / 2.0)
            .collect();
        for degree in 0..=5 {
            let p = |x: f64| (0..=degree).fold(0.0, |acc, e| acc * 0.02 * x + 1.0 / (e + 1) as f64);
            let values: Vec<f64> = sites[10..110].iter().map(|&x| p(x)).collect();
            let s = NonUniformSpline::interpolate(degree, &sites, 10, &values).unwrap();
            // the truncated ends perturb the fit only locally
            for i in 0..100 {
                let x = 55.0 + i as f64 * 0.1;
                assert!((s.eval(x) - p(x)).abs() < 1e-8, "degree {degree} x {x}");
            }
        }
    }

    #[test]
    fn single_subdomain_signal_is_its_component() {
        let dom = Arc::new(SubdomainSet::homogeneous(1.0, 30.0, 1e-3).unwrap());
        let sig = realize_signal(dom, 3, 0.25, 3).unwrap();
        for i in 0..300 {
            let x = 1.0 + i as f64 * 0.0967;
            assert_eq!(sig.eval(x), sig.component(0, x));
        }
    }

    #[test]
    fn gates_select_majority_subdomain() {
        let a = GridFunction::sample(0.0, 10.0, 1e-3, |x: f64| if x < 5.0 { 1.0 } else { 0.5 })
            .unwrap();
        let b = GridFunction::sample(0.0, 10.0, 1e-3, |x: f64| if x < 5.0 { 0.0 } else { 0.5 })
            .unwrap();
        let sig =
            realize_signal(Arc::new(SubdomainSet::new(vec![a, b]).unwrap()), 2, 0.1, 9).unwrap();
        assert_eq!(sig.open_gates(2.0).as_slice(), &[0]);
        // tie at 1/2: only the first
        assert_eq!(sig.open_gates(7.0).as_slice(), &[0]);
        assert_eq!(sig.eval(2.0), sig.component(0, 2.0));
    }

    #[test]
    fn unjittered_unit_samples_hit_controls() {
        let dom = domain(4);
        let sig = realize_signal(dom.clone(), 3, 0.0, 11).unwrap();
        let s = sample_signal(&sig, 1.0, 1.0, 30.0).unwrap();
        for (i, &v) in s.values().iter().enumerate() {
            let k = s.k_offset() + i as i64;
            let j = sig.open_gates(k as f64)[0];
            assert!((v - sig.control(j, k)).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_scales_with_step() {
        let a = sample_signal(
            &realize_signal(domain(2), 4, 0.25, 5).unwrap(),
            0.3,
            1.0,
            30.0,
        )
        .unwrap();
        let b = sample_signal(
            &realize_signal(domain(2), 4, 0.25, 5).unwrap(),
            0.3,
            1.0,
            30.0,
        )
        .unwrap();
        assert_eq!(a, b);
        let sig = realize_signal(domain(2), 4, 0.25, 5).unwrap();
        let coarse = sample_signal(&sig, 0.4, 1.0, 30.0).unwrap().len() as i64;
        let fine = sample_signal(&sig, 0.2, 1.0, 30.0).unwrap().len() as i64;
        assert!((fine - 2 * coarse).abs() <= 1);
    }

    #[test]
    fn rejects_bad_jitter() {
        assert!(realize_signal(domain(0), 3, 0.5, 1).is_err());
        assert!(realize_signal(domain(0), 3, -0.1, 1).is_err());
    }
}
