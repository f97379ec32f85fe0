//! Comparisons against independently computed reference values.

use approx::assert_abs_diff_eq;
use logspace::fnorm::orlicz_fnorm;
use logspace::nevanlinna::{class_norm, radial_mean, radial_mean_refined, HoloFunction, SweepOptions};
use logspace::operator::{fk_determinant, singular_values};
use logspace::{sample, Complex64, StepFunction, TotalMeasure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::oracle_singular_values;

#[test]
fn singular_values_match_gram_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = 1 + (rand::Rng::random_range(&mut rng, 0..8));
        let t = sample::matrix(&mut rng, n);
        let ours = singular_values(&t);
        let oracle = oracle_singular_values(&t);
        let top = oracle[0].max(1e-300);
        for (a, b) in ours.iter().zip(&oracle) {
            // squaring in the Gram matrix costs half the digits of small values
            assert!((a - b).abs() <= 1e-7 * top, "{ours:?} vs {oracle:?}");
        }
    }
}

#[test]
fn determinant_matches_lu() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let n = 1 + (rand::Rng::random_range(&mut rng, 0..8));
        let t = sample::matrix(&mut rng, n);
        let lu = t.entries().determinant().norm().powf(1.0 / n as f64);
        let ours = fk_determinant(&t);
        if ours == 0.0 {
            // rank deficient: LU returns rounding noise
            let top = singular_values(&t)[0];
            assert!((lu / top).powi(n as i32) < 1e-12, "{lu} for a singular matrix");
            continue;
        }
        assert!((ours - lu).abs() <= 1e-9 * lu.max(1e-12), "{ours} vs {lu}");
    }
}

#[test]
fn orlicz_reference_values() {
    // root of t = 0.5·log(1 + 3/t), 21 digits from mpmath
    let f = StepFunction::from_real(TotalMeasure::Finite(1.0), &[(0.0, 0.5, 3.0)]).unwrap();
    assert_abs_diff_eq!(orlicz_fnorm(&f), 0.786_036_082_289_533, epsilon = 1e-12);
    let g = StepFunction::from_real(TotalMeasure::Finite(1.0), &[(0.0, 1.0, std::f64::consts::E - 1.0)]).unwrap();
    assert_abs_diff_eq!(orlicz_fnorm(&g), 1.0, epsilon = 1e-12);
}

#[test]
fn rational_radial_mean_reference() {
    // mpmath adaptive quadrature, cross-checked by a 2^20-point trapezoid sum
    let f = HoloFunction::rational(&[Complex64::new(1.0, 0.0)], &[Complex64::new(1.0, 0.0), Complex64::new(-0.9, 0.0)])
        .unwrap();
    assert_abs_diff_eq!(radial_mean(&f, 0.99, 1 << 20).unwrap(), 0.754_644_650_236_266, epsilon = 1e-13);
}

fn inverse_singular() -> HoloFunction {
    HoloFunction::constant(Complex64::new(1.0, 0.0)).div(&HoloFunction::singular_inner(1.0).unwrap()).unwrap()
}

#[test]
fn inverse_singular_radial_means_reference() {
    // chunked 2^28-point sums of log(1 + exp((1−r²)/((1−r)² + 4r·sin²(θ/2))))
    let f = inverse_singular();
    for (k, expected) in
        [(5, 1.607868086178121), (8, 1.662983770690102), (10, 1.6780648929822175), (12, 1.6856059653570798)]
    {
        let r = 1.0 - 0.5f64.powi(k);
        let mean = radial_mean_refined(&f, r, 256, 1e-13, 1 << 24).unwrap();
        assert!(mean.resolved);
        assert_abs_diff_eq!(mean.value, expected, epsilon = 1e-11);
    }
}

#[test]
fn inverse_singular_class_norm_limit() {
    // L(r) → (1/2π)∫ max(P, 0) + log(1+e^{−|P|}) → 1 + log 2
    let cn = class_norm(&inverse_singular(), SweepOptions::new(1e-6)).unwrap();
    assert!(cn.converged);
    assert_abs_diff_eq!(cn.estimate, 1.0 + std::f64::consts::LN_2, epsilon = 1e-6);
}
