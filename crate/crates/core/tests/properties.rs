use logspace::fnorm::{decreasing_rearrangement, dlog, lognorm, orlicz_fnorm, truncate};
use logspace::operator::{dtau, lognorm_op, singular_numbers, MatrixOperator};
use logspace::{Complex64, Piece, StepFunction, TotalMeasure};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn value() -> impl Strategy<Value = Complex64> {
    (-6.0f64..6.0, 0.0f64..std::f64::consts::TAU).prop_map(|(e, t)| Complex64::from_polar(10f64.powf(e / 2.0), t))
}

fn step_function() -> impl Strategy<Value = StepFunction> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, value()), 0..8).prop_map(|raw| {
        let mut cuts: Vec<(f64, f64, Complex64)> =
            raw.into_iter().map(|(a, b, v)| (a.min(b), a.max(b), v)).filter(|(a, b, _)| a < b).collect();
        cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut pieces = Vec::new();
        let mut edge = 0.0;
        for (a, b, v) in cuts {
            if a >= edge {
                pieces.push(Piece::new(a, b, v));
                edge = b;
            }
        }
        StepFunction::new(TotalMeasure::Finite(1.0), pieces).unwrap()
    })
}

fn matrix(n: usize) -> impl Strategy<Value = MatrixOperator> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n * n).prop_map(move |v| {
        MatrixOperator::new(DMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| Complex64::new(a, b)))).unwrap()
    })
}

proptest! {
    #[test]
    fn lognorm_is_an_f_norm(f in step_function(), g in step_function(), a in 0.0f64..=1.0) {
        prop_assert!(lognorm(&f) >= 0.0);
        prop_assert_eq!(lognorm(&f) == 0.0, f.is_zero());
        prop_assert!(lognorm(&f.scale(a.into())) <= lognorm(&f) + 1e-12);
        prop_assert!(lognorm(&f.try_add(&g).unwrap()) <= lognorm(&f) + lognorm(&g) + 1e-12);
    }

    #[test]
    fn metric_is_translation_invariant(f in step_function(), g in step_function(), h in step_function()) {
        let d = dlog(&f, &g).unwrap();
        let shifted = dlog(&f.try_add(&h).unwrap(), &g.try_add(&h).unwrap()).unwrap();
        prop_assert!((d - shifted).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn orlicz_norm_is_a_fixed_point(f in step_function()) {
        let t = orlicz_fnorm(&f);
        if !f.is_zero() {
            let residual = lognorm(&f.scale((1.0 / t).into())) - t;
            prop_assert!(residual.abs() < 1e-9 * (1.0 + t), "residual {}", residual);
        } else {
            prop_assert_eq!(t, 0.0);
        }
    }

    #[test]
    fn truncation_is_monotone_in_the_cutoff(f in step_function(), m in 0.01f64..100.0) {
        let near = dlog(&f, &truncate(&f, 2.0 * m).unwrap()).unwrap();
        let far = dlog(&f, &truncate(&f, m).unwrap()).unwrap();
        prop_assert!(near <= far);
    }

    #[test]
    fn rearrangement_preserves_distribution(f in step_function(), delta in 0.001f64..1000.0) {
        let r = decreasing_rearrangement(&f);
        let direct: f64 = f.pieces().iter().filter(|p| p.value.norm() >= delta).map(|p| p.width()).sum();
        prop_assert!((r.measure_at_least(delta) - direct).abs() < 1e-12);
        prop_assert!((r.log_integral() - lognorm(&f)).abs() <= 1e-12 * (1.0 + lognorm(&f)));
    }

    #[test]
    fn matrix_lognorm_is_unitarily_invariant(t in matrix(3), theta in 0.0f64..6.3) {
        let (c, s) = (theta.cos(), theta.sin());
        let u = MatrixOperator::new(DMatrix::from_row_slice(3, 3, &[
            Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0), Complex64::new(c, 0.0), Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0),
        ])).unwrap();
        let ut = u.try_mul(&t).unwrap();
        prop_assert!((lognorm_op(&ut) - lognorm_op(&t)).abs() < 1e-12);
        prop_assert!((lognorm_op(&t) - singular_numbers(&t).log_integral()).abs() < 1e-12);
    }

    #[test]
    fn dtau_is_a_bounded_metric(a in matrix(4), b in matrix(4), c in matrix(4)) {
        let ab = dtau(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(dtau(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - dtau(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= dtau(&a, &c).unwrap() + dtau(&c, &b).unwrap() + 1e-12);
    }
}
