//! Seeded random generators for step functions and matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::operator::MatrixOperator;
use crate::step::{Piece, StepFunction, TotalMeasure};

/// Complex number with log-uniform modulus in `[10^lo, 10^hi]` and uniform
/// phase.
pub fn complex_log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    let modulus = 10f64.powf(rng.random_range(lo..hi));
    Complex64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Random step function with up to `max_pieces` pieces. On an infinite
/// ambient space the support is drawn inside `[0, 8)`. About one piece in
/// six is left at zero.
pub fn step_function<R: Rng + ?Sized>(rng: &mut R, total: TotalMeasure, max_pieces: usize) -> StepFunction {
    let extent = match total {
        TotalMeasure::Finite(t) => t,
        TotalMeasure::Infinite => 8.0,
    };
    let count = rng.random_range(1..=max_pieces.max(1));
    let mut cuts: Vec<f64> = (0..2 * count).map(|_| rng.random_range(0.0..extent)).collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    let mut pieces = Vec::with_capacity(count);
    for w in cuts.chunks(2) {
        if w[0] < w[1] && rng.random_range(0..6) != 0 {
            pieces.push(Piece::new(w[0], w[1], complex_log_uniform(rng, -3.0, 3.0)));
        }
    }
    StepFunction::new(total, pieces).expect("sorted disjoint pieces")
}

/// Random step function on `[0, 1)` whose breakpoints lie on `(1/n)ℤ`.
pub fn grid_step_function<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StepFunction {
    let cell = 1.0 / n as f64;
    let pieces = (0..n)
        .filter_map(|i| {
            if rng.random_range(0..5) == 0 {
                return None;
            }
            let v = if rng.random_range(0..3) == 0 {
                // repeated values exercise merging
                Complex64::new(2.0, 0.0)
            } else {
                complex_log_uniform(rng, -2.0, 2.0)
            };
            Some(Piece::new(i as f64 * cell, (i + 1) as f64 * cell, v))
        })
        .collect();
    StepFunction::new(TotalMeasure::Finite(1.0), pieces).expect("grid cells are disjoint")
}

/// `n×n` matrix with standard complex Gaussian entries times a log-uniform
/// scale in `[10^-2, 10^2]`; occasionally rank deficient.
pub fn matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MatrixOperator {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let mut m = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * scale
    });
    if n > 1 && rng.random_range(0..8) == 0 {
        let row = m.row(0).clone_owned();
        m.set_row(n - 1, &row);
    }
    MatrixOperator::new(m).expect("finite square matrix")
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn generators_respect_their_domains() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let f = step_function(&mut rng, TotalMeasure::Finite(2.0), 6);
            assert!(f.pieces().iter().all(|p| p.right <= 2.0));
            let g = grid_step_function(&mut rng, 8);
            assert!(g.pieces().iter().all(|p| (p.left * 8.0).fract() == 0.0 && (p.right * 8.0).fract() == 0.0));
            assert_eq!(matrix(&mut rng, 3).n(), 3);
        }
    }
}
