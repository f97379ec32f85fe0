//! Nevanlinna-class functionals on the unit disk.
//!
//! All circle integrals use the equal-weight periodic trapezoid rule, which
//! converges geometrically for integrands analytic in a strip. Radial means
//! use the grid `θ_j = 2πj/m`; boundary values use the half-step offset grid
//! `θ_j = 2π(j + ½)/m` so that `z = 1` is never sampled.

mod corpus;
mod expr;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

pub use corpus::{corpus, CorpusEntry};
pub use expr::{zero_free_on_closed_disk, HoloFunction};

use crate::error::{Error, Result};

/// Default Smirnov classification threshold.
pub const DEFAULT_SMIRNOV_TOL: f64 = 1e-4;

/// Smallest grid accepted by the quadrature routines.
pub const MIN_GRID: usize = 16;

fn check_grid(m: usize) -> Result<()> {
    if m < MIN_GRID {
        Err(Error::InvalidParameter(format!("grid size must be at least {MIN_GRID}, got {m}")))
    } else {
        Ok(())
    }
}

/// `f(z)` for `|z| ≤ 1`.
pub fn eval(f: &HoloFunction, z: Complex64) -> Result<Complex64> {
    f.eval(z)
}

/// Sum of `log(1+|f(r e^{iθ_j})|)` over `θ_j = 2π(j + offset)/m`, for the
/// indices `j = start, start + stride, …`.
fn grid_sum(f: &HoloFunction, r: f64, m: usize, offset: f64, start: usize, stride: usize) -> Result<f64> {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in (start..m).step_by(stride) {
        let theta = TAU * (j as f64 + offset) / m as f64;
        let z = Complex64::from_polar(r, theta);
        let v = f.log1p_abs_unchecked(z)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { index: j, theta });
        }
        // Neumaier summation keeps 2^28-term sums at full precision
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    Ok(sum + comp)
}

/// Trapezoid approximation of `L(r, f) = (1/2π)∫ log(1+|f(re^{iθ})|) dθ`
/// on the `m`-point grid `θ_j = 2πj/m`.
pub fn radial_mean(f: &HoloFunction, r: f64, m: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("radius must lie in [0, 1), got {r}")));
    }
    check_grid(m)?;
    Ok(grid_sum(f, r, m, 0.0, 0, 1)? / m as f64)
}

/// Radial mean refined by grid doubling until two successive grids agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinedMean {
    pub radius: f64,
    pub value: f64,
    /// Grid size of the returned value.
    pub grid: usize,
    /// Whether the doubling stopped on agreement rather than on `max_grid`.
    pub resolved: bool,
}

/// Doubles `m` from `start_grid` until the radial mean changes by less than
/// `tol`. The grids are nested, so each doubling only evaluates the new
/// midpoints.
pub fn radial_mean_refined(
    f: &HoloFunction,
    r: f64,
    start_grid: usize,
    tol: f64,
    max_grid: usize,
) -> Result<RefinedMean> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("radius must lie in [0, 1), got {r}")));
    }
    check_grid(start_grid)?;
    let mut m = start_grid;
    let mut sum = grid_sum(f, r, m, 0.0, 0, 1)?;
    let mut value = sum / m as f64;
    while 2 * m <= max_grid {
        // new points of the 2m grid are the odd indices
        sum += grid_sum(f, r, 2 * m, 0.0, 1, 2)?;
        m *= 2;
        let next = sum / m as f64;
        let change = (next - value).abs();
        value = next;
        if change < tol {
            return Ok(RefinedMean { radius: r, value, grid: m, resolved: true });
        }
    }
    Ok(RefinedMean { radius: r, value, grid: m, resolved: false })
}

/// Controls for the radial sweep behind [`class_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub tol: f64,
    pub start_grid: usize,
    /// Largest `k` in the schedule `r_k = 1 − 2^{−k}`.
    pub max_level: u32,
    pub max_grid: usize,
}

impl SweepOptions {
    pub fn new(tol: f64) -> Self {
        SweepOptions { tol, start_grid: 256, max_level: 30, max_grid: 1 << 29 }
    }
}

/// Estimate of `L(f) = sup_{r<1} L(r, f)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassNorm {
    pub estimate: f64,
    pub converged: bool,
    /// Radial means along `r_k = 1 − 2^{−k}`, in order.
    pub sweep: Vec<RefinedMean>,
}

/// Sweeps `r_k = 1 − 2^{−k}`, refining each radial mean to `tol/4`.
///
/// The increments `δ_k = L(r_k) − L(r_{k−1})` are treated as a geometric
/// tail: with ratio `q = δ_k/δ_{k−1} ∈ (0, 1)` the extrapolated value is
/// `E_k = L(r_k) + δ_k·q/(1−q)`. The sweep stops when `δ_k < tol`, or
/// earlier once two successive ratios agree and `E_k` moves by less than
/// `tol/4`. The second rule matters when `L(r, f)` approaches its limit like
/// `√(1−r)` (singular inner factors), where plain increments need grids of
/// size `~2^{k+5}` far beyond the point of usefulness. Without convergence
/// the running supremum is returned; since `L(r, f)` is nondecreasing in `r`
/// it is a lower bound for `L(f)`.
pub fn class_norm(f: &HoloFunction, options: SweepOptions) -> Result<ClassNorm> {
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", options.tol)));
    }
    let mut sweep: Vec<RefinedMean> = Vec::new();
    let mut grid = options.start_grid;
    let mut sup = 0.0f64;
    for k in 0..=options.max_level {
        let r = 1.0 - 0.5f64.powi(k as i32);
        let mean = radial_mean_refined(f, r, grid, options.tol / 4.0, options.max_grid)?;
        sweep.push(mean);
        if !mean.resolved {
            break;
        }
        // the next radius needs at least this resolution; start one level
        // below so an already adequate grid is accepted after one doubling
        grid = (mean.grid / 2).max(options.start_grid);
        sup = sup.max(mean.value);
        let values: Vec<f64> = sweep.iter().map(|m| m.value).collect();
        if let Some(estimate) = stopping_estimate(&values, options.tol) {
            return Ok(ClassNorm { estimate, converged: true, sweep });
        }
    }
    Ok(ClassNorm { estimate: sup, converged: false, sweep })
}

/// `(δ_k, q_k, E_k)` at the last index of `values`, when defined.
fn extrapolate(values: &[f64]) -> Option<(f64, f64, f64)> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let step = values[n - 1] - values[n - 2];
    let prev = values[n - 2] - values[n - 3];
    let q = if prev > 0.0 { step / prev } else { 0.0 };
    let tail = if q > 0.0 && q < 1.0 { step * q / (1.0 - q) } else { 0.0 };
    Some((step, q, values[n - 1] + tail))
}

fn stopping_estimate(values: &[f64], tol: f64) -> Option<f64> {
    let n = values.len();
    let (step, q, estimate) = extrapolate(values)?;
    if step.abs() < tol {
        return Some(estimate);
    }
    let (_, q_prev, estimate_prev) = extrapolate(&values[..n - 1])?;
    let geometric = q > 0.0 && q < 1.0 && q_prev > 0.0 && q_prev < 1.0 && (q - q_prev).abs() < 0.05;
    (geometric && (estimate - estimate_prev).abs() < tol / 4.0).then_some(estimate)
}

/// Equal-weight quadrature of `log(1+|f(e^{iθ})|)` on the offset grid.
pub fn boundary_norm(f: &HoloFunction, m: usize) -> Result<f64> {
    check_grid(m)?;
    Ok(grid_sum(f, 1.0, m, 0.5, 0, 1)? / m as f64)
}

/// Boundary norm refined by doubling from 4096 points until the change is
/// below `tol` (capped at `max_grid`).
pub fn boundary_norm_refined(f: &HoloFunction, tol: f64, max_grid: usize) -> Result<(f64, usize)> {
    let mut m = 4096;
    let mut value = boundary_norm(f, m)?;
    while 2 * m <= max_grid {
        let next = boundary_norm(f, 2 * m)?;
        m *= 2;
        let change = (next - value).abs();
        value = next;
        if change < tol {
            break;
        }
    }
    Ok((value, m))
}

/// Distance `‖Φ(f) − Φ(g)‖_log`, with the difference formed in the tree.
pub fn boundary_distance(f: &HoloFunction, g: &HoloFunction, m: usize) -> Result<f64> {
    boundary_norm(&f.sub(g), m)
}

/// `L(f − g)`, the radial-supremum distance, for comparison output.
pub fn class_distance(f: &HoloFunction, g: &HoloFunction, options: SweepOptions) -> Result<ClassNorm> {
    class_norm(&f.sub(g), options)
}

/// Boundary values on the offset grid `θ_j = 2π(j + ½)/m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleSample {
    #[serde(with = "expr::complex_json::list")]
    pub values: Vec<Complex64>,
}

impl CircleSample {
    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * (j as f64 + 0.5) / self.values.len() as f64
    }

    /// Largest pointwise gap to another sample on the same grid.
    pub fn max_abs_diff(&self, other: &CircleSample) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch { left: self.values.len(), right: other.values.len() });
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn pointwise(
        &self,
        other: &CircleSample,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<CircleSample> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch { left: self.values.len(), right: other.values.len() });
        }
        Ok(CircleSample { values: self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect() })
    }
}

/// Boundary map `Φ` sampled on the offset grid.
pub fn boundary_sample(f: &HoloFunction, m: usize) -> Result<CircleSample> {
    if m == 0 {
        return Err(Error::InvalidParameter("grid size must be positive".into()));
    }
    let values = (0..m)
        .map(|j| {
            let theta = TAU * (j as f64 + 0.5) / m as f64;
            let v = f.eval(Complex64::from_polar(1.0, theta))?;
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { index: j, theta })
            }
        })
        .collect::<Result<_>>()?;
    Ok(CircleSample { values })
}

/// Gap in the Fatou inequality `L(f) ≥ ‖Φ(f)‖_log`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmirnovReport {
    pub defect: f64,
    pub is_smirnov: bool,
    pub class_norm: f64,
    pub converged: bool,
    pub boundary_norm: f64,
    pub boundary_grid: usize,
}

/// `L(f) − ‖Φ(f)‖_log`; zero exactly on the Smirnov class `N⁺`.
pub fn smirnov_defect(f: &HoloFunction, tol: f64) -> Result<SmirnovReport> {
    let class = class_norm(f, SweepOptions::new(tol))?;
    let (boundary, grid) = boundary_norm_refined(f, tol / 4.0, 1 << 22)?;
    let defect = class.estimate - boundary;
    Ok(SmirnovReport {
        defect,
        is_smirnov: defect <= tol,
        class_norm: class.estimate,
        converged: class.converged,
        boundary_norm: boundary,
        boundary_grid: grid,
    })
}
