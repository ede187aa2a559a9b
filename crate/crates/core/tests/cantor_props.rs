mod common;

use common::cantor;
use fraclie::calculus::{fractal_derivative, fractal_integral, FractalFn};
use fraclie::cantor::{coarse_measure, FractalSet, Interval};
use proptest::prelude::*;

fn set_strategy() -> impl Strategy<Value = FractalSet> {
    (2u32..=4, 0.15f64..=0.5, 1u32..=5, -2.0f64..2.0, 0.5f64..3.0).prop_filter_map(
        "children must not overlap",
        |(m, r, depth, lo, len)| {
            let r = r.min(1.0 / m as f64);
            FractalSet::build(m, r, depth, Interval::new(lo, lo + len)).ok()
        },
    )
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measure_is_translation_invariant(set in set_strategy(), gamma in 0.2f64..=1.0, shift in -5.0f64..5.0, u in 0.0f64..0.5, v in 0.5f64..1.0) {
        let b = set.bounds();
        let (c, d) = (b.lo + u * b.len(), b.lo + v * b.len());
        let mesh = set.level_length(set.depth());
        let m0 = coarse_measure(&set, gamma, c, d, mesh).unwrap();
        let m1 = coarse_measure(&set.translate(shift), gamma, c + shift, d + shift, mesh).unwrap();
        prop_assert!(rel(m0, m1) < 1e-9, "{} vs {}", m0, m1);
    }

    #[test]
    fn measure_scales_with_gamma_power(set in set_strategy(), gamma in 0.2f64..=1.0, eps in 0.1f64..10.0) {
        let b = set.bounds();
        let mesh = set.level_length(set.depth());
        let m0 = coarse_measure(&set, gamma, b.lo, b.hi, mesh).unwrap();
        let m1 = coarse_measure(&set.scale(eps), gamma, eps * b.lo, eps * b.hi, eps * mesh).unwrap();
        prop_assert!(rel(m1, eps.powf(gamma) * m0) < 1e-9);
    }

    #[test]
    fn staircase_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let s = cantor(10);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(s.value(lo) <= s.value(hi));
    }

    #[test]
    fn derivative_and_integral_are_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, k in 0usize..64) {
        let s = cantor(10);
        let x = s.source().left_endpoints()[k * 16];
        let (s1, s2, s3) = (s.clone(), s.clone(), s.clone());
        let f = FractalFn::new("sin S", move |x| s1.value(x).sin());
        let g = FractalFn::new("S^2", move |x| s2.value(x).powi(2));
        let h = FractalFn::new("a sin S + b S^2", move |x| a * s3.value(x).sin() + b * s3.value(x).powi(2));
        let d = |q: &FractalFn| fractal_derivative(q, &s, x, 12).unwrap().value;
        prop_assert!((d(&h) - a * d(&f) - b * d(&g)).abs() < 1e-9);
        let i = |q: &FractalFn| fractal_integral(q, &s, 0.0, 1.0).unwrap().value;
        prop_assert!((i(&h) - a * i(&f) - b * i(&g)).abs() < 1e-12);
    }
}

#[test]
fn staircase_gaps_and_halving() {
    let s = cantor(14);
    assert_eq!(s.value(1.0 / 3.0), s.value(2.0 / 3.0));
    assert_eq!(s.value(0.4), s.value(0.6));
    assert!((s.value(1.0 / 3.0) - s.value(1.0) / 2.0).abs() < 1e-15);
    assert!(s.value(0.3) < s.value(1.0 / 3.0));
}

#[test]
fn measure_is_additive_at_aligned_points() {
    let set = FractalSet::middle_third(8);
    let mesh = set.level_length(8);
    let gamma = common::CANTOR_DIM;
    for b in [1.0 / 3.0, 2.0 / 9.0, 2.0 / 3.0, 20.0 / 27.0] {
        let whole = coarse_measure(&set, gamma, 0.0, 1.0, mesh).unwrap();
        let parts = coarse_measure(&set, gamma, 0.0, b, mesh).unwrap()
            + coarse_measure(&set, gamma, b, 1.0, mesh).unwrap();
        assert!(rel(whole, parts) < 1e-9, "b = {b}: {whole} vs {parts}");
    }
}

#[test]
fn fundamental_theorem_pair() {
    // ∫ D(g∘S) = g(S(1)) - g(S(0)) for g = sin
    let s = cantor(10);
    let s1 = s.clone();
    let derivative = FractalFn::new("cos S", move |x| s1.value(x).cos());
    let est = fractal_integral(&derivative, &s, 0.0, 1.0).unwrap();
    let exact = s.value(1.0).sin();
    assert!(
        (est.value - exact).abs() <= est.bracket_width().max(1e-12),
        "{est:?} vs {exact}"
    );
}
