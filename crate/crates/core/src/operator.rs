//! The noncommutative space on `M_n(ℂ)` with normalized trace `τ = Tr/n`.
//!
//! Every quantity here is a function of the singular values and right
//! singular vectors of a matrix: `μ(T)` is the step function taking the value
//! `σ_i` on an interval of width `1/n`, `|T| = V Σ V*`, and spectral
//! projections of `|T|` are sums of `v_i v_i*`.

use std::cmp::Ordering;
use std::ops::{Bound, RangeBounds};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::step::{SingularStep, StepFunction, TotalMeasure};

/// Singular values below `RANK_TOL · σ_max` are treated as exact zeros.
pub const RANK_TOL: f64 = 1e-12;

/// An `n×n` complex matrix, viewed as an element of `(M_n(ℂ), Tr/n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct MatrixOperator {
    entries: DMatrix<Complex64>,
}

impl MatrixOperator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::MalformedInput(format!(
                "matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::MalformedInput("matrix has non-finite entries".into()));
        }
        Ok(MatrixOperator { entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedInput("rows must all have length n".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn zero(n: usize) -> Self {
        MatrixOperator { entries: DMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        MatrixOperator { entries: DMatrix::identity(n, n) }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        MatrixOperator { entries: DMatrix::from_diagonal(&DVector::from_column_slice(values)) }
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let values: Vec<Complex64> = values.iter().map(|&v| v.into()).collect();
        Self::diagonal(&values)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        MatrixOperator { entries: self.entries.adjoint() }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        MatrixOperator { entries: &self.entries * alpha }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(MatrixOperator { entries: &self.entries + &other.entries })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(MatrixOperator { entries: &self.entries - &other.entries })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(MatrixOperator { entries: &self.entries * &other.entries })
    }

    /// Normalized trace `Tr(T)/n`.
    pub fn trace(&self) -> Complex64 {
        self.entries.trace() / self.n() as f64
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n() == other.n() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.n(), right: other.n() })
        }
    }

    fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    /// Singular values (descending) with their right singular vectors.
    fn decompose(&self) -> Decomposition {
        let n = self.n();
        let mut pairs: Vec<(f64, DVector<Complex64>)> = if self.is_diagonal() {
            (0..n)
                .map(|i| {
                    let mut e = DVector::zeros(n);
                    e[i] = Complex64::new(1.0, 0.0);
                    (self.entries[(i, i)].norm(), e)
                })
                .collect()
        } else {
            let svd = self.entries.clone().svd(false, true);
            let v_t = svd.v_t.expect("right singular vectors were requested");
            (0..n).map(|i| (svd.singular_values[i], v_t.row(i).adjoint())).collect()
        };
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
        let cutoff = RANK_TOL * pairs.first().map_or(0.0, |p| p.0);
        for p in &mut pairs {
            if p.0 < cutoff || p.0 == 0.0 {
                p.0 = 0.0;
            }
        }
        let (values, vectors) = pairs.into_iter().unzip();
        Decomposition { values, vectors }
    }
}

struct Decomposition {
    values: Vec<f64>,
    vectors: Vec<DVector<Complex64>>,
}

/// Singular values of `T`, sorted nonincreasing.
pub fn singular_values(t: &MatrixOperator) -> Vec<f64> {
    t.decompose().values
}

/// Operator norm `‖T‖ = σ_max(T)`.
pub fn operator_norm(t: &MatrixOperator) -> f64 {
    singular_values(t).first().copied().unwrap_or(0.0)
}

/// The singular-number function `μ(T)`: heights `σ_i`, each of width `1/n`.
pub fn singular_numbers(t: &MatrixOperator) -> SingularStep {
    let n = t.n();
    let mut steps: Vec<(f64, f64)> = Vec::new();
    let mut count = 0usize;
    let values = singular_values(t);
    for (i, &s) in values.iter().enumerate() {
        count += 1;
        if values.get(i + 1) != Some(&s) {
            steps.push((count as f64 / n as f64, s));
            count = 0;
        }
    }
    SingularStep::new(TotalMeasure::Finite(1.0), steps).expect("sorted singular values form a valid step")
}

/// `‖T‖_log = τ(log(1+|T|)) = (1/n) Σ log(1+σ_i)`.
pub fn lognorm_op(t: &MatrixOperator) -> f64 {
    singular_values(t).iter().map(|s| s.ln_1p()).sum::<f64>() / t.n() as f64
}

pub fn dlog_op(s: &MatrixOperator, t: &MatrixOperator) -> Result<f64> {
    Ok(lognorm_op(&s.try_sub(t)?))
}

/// Measure-topology metric `Σ_{k≥1} 2^{-k} τ(E_{|A−B|}([1/k, ∞)))`.
///
/// A singular value `σ > 0` lies in `[1/k, ∞)` exactly for `k ≥ k_σ`, the
/// smallest such integer, and contributes `2^{1−k_σ}/n` to the series.
pub fn dtau(a: &MatrixOperator, b: &MatrixOperator) -> Result<f64> {
    let diff = a.try_sub(b)?;
    let n = diff.n() as f64;
    Ok(singular_values(&diff).iter().filter(|&&s| s > 0.0).map(|&s| (1.0 - first_level(s)).exp2() / n).sum())
}

/// Smallest integer `k ≥ 1` with `σ ≥ 1/k` (as an `f64`, to avoid overflow
/// for tiny `σ`).
fn first_level(sigma: f64) -> f64 {
    let mut k = (1.0 / sigma).ceil().max(1.0);
    if k < 2f64.powi(52) {
        while k > 1.0 && sigma >= 1.0 / (k - 1.0) {
            k -= 1.0;
        }
        while sigma < 1.0 / k {
            k += 1.0;
        }
    }
    k
}

/// Orthogonal projection `E_{|T|}(I)` onto the span of right singular
/// vectors whose singular value lies in `interval`.
///
/// Accepts any range over `[0, ∞)`: `a..b`, `a..`, or explicit
/// `(Bound, Bound)` pairs for open endpoints.
pub fn spectral_project(t: &MatrixOperator, interval: impl RangeBounds<f64>) -> Result<MatrixOperator> {
    let lo = interval.start_bound().cloned();
    let hi = interval.end_bound().cloned();
    let lo_value = match lo {
        Bound::Included(a) | Bound::Excluded(a) => a,
        Bound::Unbounded => 0.0,
    };
    if !(lo_value >= 0.0) {
        return Err(Error::InvalidParameter(format!("interval must start at a >= 0, got {lo_value}")));
    }
    if let Bound::Included(b) | Bound::Excluded(b) = hi {
        if !(b > lo_value) {
            return Err(Error::InvalidParameter(format!("empty interval: upper end {b} <= lower end {lo_value}")));
        }
    }
    let range = (lo, hi);
    let d = t.decompose();
    let n = t.n();
    let mut p = DMatrix::<Complex64>::zeros(n, n);
    for (s, v) in d.values.iter().zip(&d.vectors) {
        if range.contains(s) {
            p += v * v.adjoint();
        }
    }
    Ok(MatrixOperator { entries: p })
}

/// `T = T·E_{|T|}([0, K]) + T·E_{|T|}((K, ∞))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSplit {
    pub bounded_part: MatrixOperator,
    pub tail_part: MatrixOperator,
    pub cutoff: f64,
}

pub fn split_at(t: &MatrixOperator, cutoff: f64) -> Result<SpectralSplit> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    let low = spectral_project(t, 0.0..=cutoff)?;
    let high = spectral_project(t, (Bound::Excluded(cutoff), Bound::Unbounded))?;
    Ok(SpectralSplit { bounded_part: t.try_mul(&low)?, tail_part: t.try_mul(&high)?, cutoff })
}

/// Fuglede–Kadison determinant `exp τ(log|T|) = (Π σ_i)^{1/n}`.
pub fn fk_determinant(t: &MatrixOperator) -> f64 {
    let values = singular_values(t);
    if values.contains(&0.0) {
        return 0.0;
    }
    (values.iter().map(|s| s.ln()).sum::<f64>() / values.len() as f64).exp()
}

/// Diagonal matrix of a step function on `[0, 1)` whose breakpoints lie on
/// the grid `(1/n)ℤ`; entry `i` is the value on `[i/n, (i+1)/n)`.
pub fn embed_diagonal(f: &StepFunction, n: usize) -> Result<MatrixOperator> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if f.total_measure() != TotalMeasure::Finite(1.0) {
        return Err(Error::InvalidParameter(format!("embedding needs total measure 1, got {}", f.total_measure())));
    }
    let scale = n as f64;
    let on_grid = |x: f64| ((x * scale).round() - x * scale).abs() <= 1e-9;
    if let Some(p) = f.pieces().iter().find(|p| !on_grid(p.left) || !on_grid(p.right)) {
        return Err(Error::InvalidParameter(format!(
            "piece [{}, {}) is not a union of cells of width 1/{n}",
            p.left, p.right
        )));
    }
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    for p in f.pieces() {
        let (a, b) = ((p.left * scale).round() as usize, (p.right * scale).round() as usize);
        for d in &mut diag[a..b] {
            *d = p.value;
        }
    }
    Ok(MatrixOperator::diagonal(&diag))
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

impl TryFrom<MatrixJson> for MatrixOperator {
    type Error = Error;

    fn try_from(raw: MatrixJson) -> Result<Self> {
        let n = raw.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&raw.re) || raw.im.as_ref().is_some_and(|im| !shape_ok(im)) {
            return Err(Error::MalformedInput(format!("matrix rows must form an {n}x{n} array")));
        }
        let entries =
            DMatrix::from_fn(n, n, |i, j| Complex64::new(raw.re[i][j], raw.im.as_ref().map_or(0.0, |im| im[i][j])));
        MatrixOperator::new(entries)
    }
}

impl From<MatrixOperator> for MatrixJson {
    fn from(t: MatrixOperator) -> Self {
        let n = t.n();
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(&t.entries[(i, j)])).collect()).collect()
        };
        MatrixJson { n, re: rows(|z| z.re), im: Some(rows(|z| z.im)) }
    }
}
