//! Reference functions used by the self-test suite and the CLI.

use num_complex::Complex64;

use super::HoloFunction;

/// A named member of the reference corpus.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub function: HoloFunction,
    /// Bounded analytic on the disk, hence in the Smirnov class.
    pub bounded: bool,
    /// Finite Blaschke product or singular inner function.
    pub inner: bool,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bounded analytic functions, inner functions, and `1/S` with `S` the
/// singular inner function of unit mass at `z = 1`.
pub fn corpus() -> Vec<CorpusEntry> {
    let entry = |name, function, bounded, inner| CorpusEntry { name, function, bounded, inner };
    let b_half = HoloFunction::blaschke(c(0.5, 0.0)).expect("|a| < 1");
    let singular = HoloFunction::singular_inner(1.0).expect("positive mass");
    vec![
        entry("zero", HoloFunction::constant(c(0.0, 0.0)), true, false),
        entry("constant", HoloFunction::constant(c(3.0, -4.0)), true, false),
        entry("z", HoloFunction::identity(), true, false),
        entry("1+z+z^2", HoloFunction::real_polynomial(&[1.0, 1.0, 1.0]).expect("finite"), true, false),
        entry(
            "1/(1-0.9z)",
            HoloFunction::rational(&[c(1.0, 0.0)], &[c(1.0, 0.0), c(-0.9, 0.0)]).expect("zero-free"),
            true,
            false,
        ),
        entry(
            "z/(2+z)",
            HoloFunction::identity()
                .div(&HoloFunction::real_polynomial(&[2.0, 1.0]).expect("finite"))
                .expect("zero-free"),
            true,
            false,
        ),
        entry("B(0.5)", b_half.clone(), true, true),
        entry("B(0.3i)", HoloFunction::blaschke(c(0.0, 0.3)).expect("|a| < 1"), true, true),
        entry(
            "B(0.5)B(-0.3+0.4i)B(0.9i)",
            HoloFunction::blaschke_product(&[c(0.5, 0.0), c(-0.3, 0.4), c(0.0, 0.9)]).expect("|a| < 1"),
            true,
            true,
        ),
        entry("B(0.5)(1+z)", b_half.mul(&HoloFunction::real_polynomial(&[1.0, 1.0]).expect("finite")), true, false),
        entry("S(1)", singular.clone(), true, true),
        entry("1/S(1)", HoloFunction::constant(c(1.0, 0.0)).div(&singular).expect("inner denominator"), false, false),
    ]
}
