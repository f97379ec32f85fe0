//! The F-norm `‖f‖_log = ∫ log(1+|f|)`, its metric, the Orlicz F-norm, and
//! the truncation machinery showing `L¹` is dense.

use crate::error::{Error, Result};
use crate::step::{SingularStep, StepFunction, TotalMeasure};

/// `‖f‖_log = Σ (right − left)·log(1 + |value|)`.
pub fn lognorm(f: &StepFunction) -> f64 {
    f.pieces().iter().map(|p| p.width() * p.value.norm().ln_1p()).sum()
}

/// Translation-invariant metric `d(f, g) = ‖f − g‖_log`.
pub fn dlog(f: &StepFunction, g: &StepFunction) -> Result<f64> {
    Ok(lognorm(&f.try_sub(g)?))
}

pub fn l1norm(f: &StepFunction) -> f64 {
    f.pieces().iter().map(|p| p.width() * p.value.norm()).sum()
}

/// Absolute tolerance of the Orlicz bisection.
pub const ORLICZ_TOL: f64 = 1e-12;
const ORLICZ_MAX_ITER: usize = 200;

/// Orlicz F-norm `‖f‖_φ = inf{λ > 0 : ‖f/λ‖_log ≤ λ}` for `φ(t) = log(1+t)`.
///
/// `λ ↦ ‖f/λ‖_log − λ` is strictly decreasing for `f ≠ 0`, so the infimum is
/// its unique root. The returned value is the upper end of the final
/// bracket, so it always satisfies `‖f/λ‖_log ≤ λ`.
pub fn orlicz_fnorm(f: &StepFunction) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let excess = |lambda: f64| lognorm_scaled(f, 1.0 / lambda) - lambda;
    let mut hi = lognorm(f).max(1.0);
    while excess(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..ORLICZ_MAX_ITER {
        if hi - lo <= ORLICZ_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn lognorm_scaled(f: &StepFunction, scale: f64) -> f64 {
    f.pieces().iter().map(|p| p.width() * (scale * p.value.norm()).ln_1p()).sum()
}

/// `f_M`: keeps `f` where `|f| ≤ M`, zero elsewhere.
pub fn truncate(f: &StepFunction, cutoff: f64) -> Result<StepFunction> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!("truncation level must be positive, got {cutoff}")));
    }
    Ok(f.filter(|p| p.value.norm() <= cutoff))
}

/// `K_M = M / log(1+M)`, the constant with `t ≤ K_M·log(1+t)` on `[0, M]`.
pub fn l1_constant(cutoff: f64) -> f64 {
    cutoff / cutoff.ln_1p()
}

/// An `L¹` approximant produced by truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Approximation {
    /// Power of two used as truncation level.
    pub cutoff: f64,
    pub approximation: StepFunction,
    /// `dlog(f, approximation)`.
    pub distance: f64,
}

/// Truncates `f` at the smallest power of two `M` with `dlog(f, f_M) < eps`.
///
/// `M ↦ dlog(f, f_M)` only changes at the distinct moduli of `f`, so the
/// search runs over those. When nothing needs to be kept, the cutoff is the
/// largest power of two strictly below every modulus (1 for `f = 0`).
pub fn approximate_in_l1(f: &StepFunction, eps: f64) -> Result<L1Approximation> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let mut moduli: Vec<f64> = f.pieces().iter().map(|p| p.value.norm()).collect();
    moduli.sort_by(|a, b| a.total_cmp(b));
    moduli.dedup();

    let Some(&smallest) = moduli.first() else {
        return Ok(L1Approximation { cutoff: 1.0, approximation: f.clone(), distance: 0.0 });
    };
    let total = lognorm(f);
    let mut level = None;
    if total < eps {
        level = Some(None);
    } else {
        for &m in &moduli {
            let dropped = lognorm(&f.filter(|p| p.value.norm() > m));
            if dropped < eps {
                level = Some(Some(m));
                break;
            }
        }
    }
    let cutoff = match level.expect("keeping every piece always satisfies the bound") {
        Some(m) => power_of_two_at_least(m),
        None => power_of_two_below(smallest),
    };
    let approximation = truncate(f, cutoff)?;
    let distance = dlog(f, &approximation)?;
    Ok(L1Approximation { cutoff, approximation, distance })
}

fn power_of_two_at_least(x: f64) -> f64 {
    let mut p = 2f64.powi(x.log2().floor() as i32);
    while p < x {
        p *= 2.0;
    }
    while p / 2.0 >= x {
        p /= 2.0;
    }
    p
}

fn power_of_two_below(x: f64) -> f64 {
    let mut p = power_of_two_at_least(x);
    while p >= x {
        p /= 2.0;
    }
    p
}

/// Nonincreasing rearrangement `|f|*`.
///
/// Widths are the piece lengths; on a finite ambient space the uncovered
/// part appears as a final zero-height step, so total width equals the
/// ambient measure.
pub fn decreasing_rearrangement(f: &StepFunction) -> SingularStep {
    let mut steps: Vec<(f64, f64)> = f.pieces().iter().map(|p| (p.width(), p.value.norm())).collect();
    if let TotalMeasure::Finite(total) = f.total_measure() {
        let rest = total - f.support_measure();
        if rest > 0.0 {
            steps.push((rest, 0.0));
        }
    }
    SingularStep::from_unsorted(f.total_measure(), steps)
}
