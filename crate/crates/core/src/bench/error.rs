use crate::dibasis::GeneratingBasis;
use crate::interp::{Interpolant, SampleSequence};
use crate::splines::half_support;
use crate::{Error, Result};

use super::SyntheticSignal;

/// Quadrature nodes per sampling step for L2 norms.
pub const ERROR_QUAD_DIVISIONS: usize = 50;

/// `[(k_min + Δ)T, (k_max − Δ)T]`: the part of the sampled range whose
/// kernels all belong to actual samples.
pub fn interior_interval(samples: &SampleSequence<f64>, order: usize) -> Result<(f64, f64)> {
    let delta: f64 = half_support(order);
    let t = samples.step();
    let a = (samples.k_offset() as f64 + delta) * t;
    let b = (samples.last_index() as f64 - delta) * t;
    if !(a < b) {
        return Err(Error::invalid(format!(
            "no interior left for order {order} with {} samples",
            samples.len()
        )));
    }
    Ok((a, b))
}

/// Trapezoid nodes and weights on `[a, b]` with spacing at most `h`.
pub(crate) fn trapezoid(a: f64, b: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let cells = ((b - a) / h - 1e-9).ceil().max(1.0) as usize;
    let h = (b - a) / cells as f64;
    let nodes = (0..=cells).map(|i| a + i as f64 * h).collect();
    let weights = (0..=cells)
        .map(|i| if i == 0 || i == cells { h / 2.0 } else { h })
        .collect();
    (nodes, weights)
}

pub(crate) fn l2_ratio(truth: &[f64], approx: &[f64], weights: &[f64]) -> Result<f64> {
    let (mut diff, mut norm) = (0.0, 0.0);
    for ((&s, &a), &w) in truth.iter().zip(approx).zip(weights) {
        diff += w * (a - s) * (a - s);
        norm += w * s * s;
    }
    if !(norm > 0.0) {
        return Err(Error::invalid(
            "reference signal has zero norm on the interval",
        ));
    }
    Ok((diff / norm).sqrt())
}

/// `‖s̃ − s‖ / ‖s‖` on `[a, b]`, by the trapezoid rule at spacing
/// `T/50`.
pub fn relative_l2_error<B: GeneratingBasis<f64>>(
    truth: &SyntheticSignal,
    interp: &Interpolant<f64, B>,
    a: f64,
    b: f64,
) -> Result<f64> {
    if !(a < b) {
        return Err(Error::invalid(format!("empty interval [{a}, {b}]")));
    }
    let (nodes, weights) = trapezoid(a, b, interp.basis().step() / ERROR_QUAD_DIVISIONS as f64);
    let exact: Vec<f64> = nodes.iter().map(|&x| truth.eval(x)).collect();
    let approx = interp.evaluate_many(&nodes)?;
    l2_ratio(&exact, &approx, &weights)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bench::{realize_signal, sample_signal};
    use crate::dibasis::{DiBasis, Shaping};
    use crate::domain::{realize_domain, SubdomainSet};
    use crate::interp::{interpolate_bsi, interpolate_dibsi};

    #[test]
    fn interior_trims_half_support() {
        let s = SampleSequence::new(vec![0.0; 11], 0.5, 2).unwrap();
        assert_eq!(interior_interval(&s, 3).unwrap(), (2.0, 5.0));
        assert!(interior_interval(&SampleSequence::new(vec![0.0; 4], 1.0, 0).unwrap(), 3).is_err());
    }

    #[test]
    fn fine_resampling_of_truth_is_nearly_exact() {
        // Linear interpolation of a cubic spline sampled at T = 1e-3: O(T²).
        let dom = Arc::new(realize_domain(2, 9, 1.0, 30.0, 3).unwrap());
        let sig = realize_signal(dom, 1, 0.25, 8).unwrap();
        let s = sample_signal(&sig, 1e-3, 5.0, 15.0).unwrap();
        let it = interpolate_bsi(&s, 1).unwrap();
        let (a, b) = interior_interval(&s, 1).unwrap();
        // Gate switches cause jumps; keep to one side of them by checking a
        // gate-free stretch.
        let mut x = a;
        while sig.open_gates(x) != sig.open_gates(x + 1.0) && x < b - 2.0 {
            x += 0.25;
        }
        assert!(relative_l2_error(&sig, &it, x, x + 1.0).unwrap() < 1e-6);
    }

    #[test]
    fn constant_truth_gives_zero_error() {
        let dom = Arc::new(SubdomainSet::homogeneous(1.0, 30.0, 1e-3).unwrap());
        let sig = realize_signal(dom.clone(), 0, 0.0, 1).unwrap();
        // order 0 with α = 0 is piecewise constant; any single piece is constant
        let s = sample_signal(&sig, 0.1, 10.0, 10.4).unwrap();
        let it = interpolate_bsi(&s, 3).unwrap();
        assert!(relative_l2_error(&sig, &it, 10.1, 10.3).unwrap() < 1e-12);
    }

    #[test]
    fn errors_shrink_with_step() {
        let dom = Arc::new(realize_domain(2, 9, 1.0, 30.0, 6).unwrap());
        let sig = realize_signal(dom.clone(), 3, 0.25, 2).unwrap();
        let mut last = (f64::INFINITY, f64::INFINITY);
        for t in [1.0, 0.5, 0.25, 0.1] {
            let s = sample_signal(&sig, t, 1.0, 30.0).unwrap();
            let (a, b) = interior_interval(&s, 3).unwrap();
            let basis = Arc::new(DiBasis::new(dom.clone(), 3, t, Shaping::default()).unwrap());
            let e_di =
                relative_l2_error(&sig, &interpolate_dibsi(&s, basis).unwrap(), a, b).unwrap();
            let e_bsi = relative_l2_error(&sig, &interpolate_bsi(&s, 3).unwrap(), a, b).unwrap();
            assert!(e_di < last.0 && e_bsi < last.1, "T {t}: {e_di} {e_bsi}");
            last = (e_di, e_bsi);
        }
    }

    #[test]
    fn zero_norm_truth_is_rejected() {
        assert!(l2_ratio(&[0.0, 0.0], &[1.0, 1.0], &[0.5, 0.5]).is_err());
    }
}
