mod common;

use std::sync::Arc;

use common::oracles::{
    bsi_eval, homogeneous_runs, standard_gram_extremes, unrolled_bsi_coefficients,
    ConvolutionOracle,
};
use dibsi::dibasis::{riesz_bounds_estimate, DiBasis, GeneratingBasis, Shaping, StandardBasis};
use dibsi::domain::{realize_domain, SubdomainSet};
use dibsi::interp::{assemble_collocation, interpolate_bsi, interpolate_dibsi, SampleSequence};
use dibsi::splines::{bspline_eval, half_support};
use rand::Rng;

fn random_samples(seed: u64, n: usize, step: f64, k0: i64) -> SampleSequence<f64> {
    let mut rng = dibsi::seed::rng(seed);
    SampleSequence::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(), step, k0).unwrap()
}

#[test]
fn bsi_matches_unrolled_dense_solve() {
    let oracle = ConvolutionOracle::new(7, 1e-4);
    for order in 1..=7 {
        let s = random_samples(order as u64, 17, 0.5, -3);
        let want = unrolled_bsi_coefficients(&oracle, order, s.values(), 8);
        let it = interpolate_bsi(&s, order).unwrap();
        for (a, b) in it.coeffs().iter().zip(&want) {
            assert!((a - b).abs() < 1e-6, "order {order}: {a} vs {b}");
        }
        let mut rng = dibsi::seed::rng(99);
        for _ in 0..200 {
            let x = rng.gen_range(-3.0 * 0.5..13.0 * 0.5);
            let want = bsi_eval(&oracle, order, &want, -3, 0.5, x);
            assert!((it.evaluate(x).unwrap() - want).abs() < 1e-6);
        }
    }
}

#[test]
fn cubic_bsi_reproduces_cubics_away_from_ends() {
    let p = |x: f64| 1.0 + x - 0.3 * x * x + 0.02 * x * x * x;
    let s = SampleSequence::new((0..80).map(|k| p(0.25 * k as f64)).collect(), 0.25, 0).unwrap();
    let it = interpolate_bsi(&s, 3).unwrap();
    for i in 0..=500 {
        let x = 8.0 + i as f64 * 0.008;
        assert!((it.evaluate(x).unwrap() - p(x)).abs() < 1e-9);
    }
}

#[test]
fn homogeneous_cubic_rows() {
    let dom = Arc::new(SubdomainSet::homogeneous(0.0, 12.0, 1e-3).unwrap());
    let basis = DiBasis::new(dom, 3, 1.0, Shaping::default()).unwrap();
    let sys = assemble_collocation(&basis, &random_samples(1, 13, 1.0, 0)).unwrap();
    for i in 1..12 {
        let row = [
            sys.matrix.get(i, i - 1),
            sys.matrix.get(i, i),
            sys.matrix.get(i, i + 1),
        ];
        for (got, want) in row.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }
}

#[test]
fn low_order_coefficients_equal_samples_on_random_domains() {
    let dom = Arc::new(realize_domain(3, 9, 1.0, 30.0, 12).unwrap());
    for order in [0, 1] {
        let basis = Arc::new(DiBasis::new(dom.clone(), order, 0.5, Shaping::default()).unwrap());
        let (k0, k1) = basis.sample_range();
        let s = random_samples(5, (k1 - k0 + 1) as usize, 0.5, k0);
        assert_eq!(interpolate_dibsi(&s, basis).unwrap().coeffs(), s.values());
    }
}

#[test]
fn dibsi_constant_reproduction_and_consistency() {
    for seed in 0..4 {
        let dom = Arc::new(realize_domain(2, 9, 1.0, 30.0, seed).unwrap());
        for order in 1..=6 {
            for step in [0.3, 1.0] {
                let basis =
                    Arc::new(DiBasis::new(dom.clone(), order, step, Shaping::default()).unwrap());
                let (k0, k1) = basis.sample_range();
                let n = (k1 - k0 + 1) as usize;
                let c = SampleSequence::new(vec![2.5; n], step, k0).unwrap();
                let it = interpolate_dibsi(&c, basis.clone()).unwrap();
                for i in 0..300 {
                    let x = k0 as f64 * step + i as f64 * (n - 1) as f64 * step / 299.0;
                    assert!((it.evaluate(x).unwrap() - 2.5).abs() < 1e-12);
                }
                let s = random_samples(seed + 100, n, step, k0);
                let it = interpolate_dibsi(&s, basis).unwrap();
                for (i, v) in s.values().iter().enumerate() {
                    let got = it.evaluate((k0 + i as i64) as f64 * step).unwrap();
                    assert!(
                        (got - v).abs() < 1e-9,
                        "seed {seed} n {order} T {step} k {}: {got} vs {v}",
                        k0 + i as i64
                    );
                }
            }
        }
    }
}

#[test]
fn kernels_equal_standard_where_twice_the_support_is_homogeneous() {
    // A kernel's neighbors reach one more half-support out, so the domain must
    // be homogeneous over [k − 2Δ, k + 2Δ] for the kernel to be untouched.
    let mut checked = 0;
    for seed in 0..6 {
        let dom = Arc::new(realize_domain(2, 9, 1.0, 30.0, seed).unwrap());
        for order in 1..=5 {
            let basis = DiBasis::new(dom.clone(), order, 1.0, Shaping::default()).unwrap();
            let delta: f64 = half_support(order);
            for k in 1..=30i64 {
                let (a, b) = (k as f64 - 2.0 * delta, k as f64 + 2.0 * delta);
                if a < 1.0 || b > 30.0 || dom.is_homogeneous(a, b, 1e-9).unwrap().is_none() {
                    continue;
                }
                checked += 1;
                for i in 0..=200 {
                    let x = -delta + i as f64 * delta / 100.0;
                    assert!((basis.di_bspline_eval(k, x) - bspline_eval(order, x)).abs() < 1e-9);
                }
            }
        }
    }
    assert!(checked > 20, "only {checked} homogeneous kernels found");
}

#[test]
fn homogeneous_runs_are_found() {
    let dom = realize_domain::<f64>(2, 9, 1.0, 30.0, 3).unwrap();
    let runs = homogeneous_runs(&dom, 1.0, 1, 30);
    assert!(!runs.is_empty());
    for (a, b, j) in runs {
        assert_eq!(
            dom.is_homogeneous(a as f64, b as f64, 1e-9).unwrap(),
            Some(j)
        );
    }
}

#[test]
fn standard_gram_bounds_match_toeplitz_oracle() {
    let oracle = ConvolutionOracle::new(9, 1e-4);
    for order in 1..=4 {
        let basis = StandardBasis::new(order, 1.0).unwrap();
        let got = riesz_bounds_estimate(&basis, 0, 29, 1e-3).unwrap();
        let (lo, hi) = standard_gram_extremes(&oracle, order, 30);
        assert!(
            (got.lower - lo).abs() < 1e-5,
            "n {order}: {} vs {lo}",
            got.lower
        );
        assert!((got.upper - hi).abs() < 1e-5);
    }
}

#[test]
fn domain_informed_gram_is_positive_definite() {
    for seed in 0..5 {
        let dom = Arc::new(realize_domain(2, 9, 1.0, 30.0, seed).unwrap());
        for order in 1..=4 {
            let basis = DiBasis::new(dom.clone(), order, 1.0, Shaping::default()).unwrap();
            let b = basis.riesz_bounds_estimate(0.01).unwrap();
            assert!(b.lower > 1e-8 && b.lower <= b.upper);
        }
    }
}

#[test]
fn generating_basis_kernels_agree_with_point_queries() {
    let dom = Arc::new(realize_domain(2, 9, 1.0, 30.0, 8).unwrap());
    let basis = DiBasis::new(dom, 4, 1.0, Shaping::default()).unwrap();
    let mut rng = dibsi::seed::rng(3);
    for _ in 0..500 {
        let u: f64 = rng.gen_range(3.0..28.0);
        for (k, v) in basis.kernels_at(u) {
            assert!((basis.di_bspline_eval(k, u - k as f64) - v).abs() < 1e-14);
        }
    }
}
