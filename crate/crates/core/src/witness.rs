//! Constructions behind the negative results and the completeness argument:
//! non-bounded neighbourhoods of 0, convex splitting of arbitrary functions,
//! the gap between the measure and log topologies, and Cauchy limits.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fnorm::{dlog, lognorm};
use crate::step::{refine, Piece, StepFunction, TotalMeasure};

/// `f = K·χ_E` with `ν(E) = η`, lying in `V_ε` but not in `N·V_{ε/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnboundednessWitness {
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "K")]
    pub k: f64,
    pub eta: f64,
    /// `η·log(1+K) = ‖f‖_log`.
    pub norm_f: f64,
    /// `η·log(1+K/N) = ‖f/N‖_log`.
    pub norm_f_over_n: f64,
}

impl UnboundednessWitness {
    /// The witness function `K·χ_[0, η)` on `[0, 1)`.
    pub fn function(&self) -> Result<StepFunction> {
        StepFunction::indicator(TotalMeasure::Finite(1.0), 0.0, self.eta, self.k.into())
    }

    /// Re-checks both defining inequalities with fresh norm evaluations.
    pub fn verify(&self) -> Result<bool> {
        let f = self.function()?;
        let inside = lognorm(&f) < self.eps;
        let outside = lognorm(&f.scale((1.0 / self.n as f64).into())) >= self.eps / 2.0;
        Ok(inside && outside)
    }
}

/// Builds a witness on `[0, 1)` that `V_ε` is not bounded.
///
/// `K` doubles from 1 until `2·log(1+K/N) > log(1+K)` and the admissible
/// interval `(ε/(2·log(1+K/N)), ε/log(1+K))` for `η` reaches below 1, so the
/// set `E = [0, η)` fits in the unit interval; `η` is the midpoint of that
/// interval clipped to `(0, 1]`.
pub fn unboundedness_witness(eps: f64, n: u32) -> Result<UnboundednessWitness> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let nf = n as f64;
    let mut k = 1.0f64;
    loop {
        let big = k.ln_1p();
        let small = (k / nf).ln_1p();
        let lo = eps / (2.0 * small);
        if 2.0 * small > big && lo < 1.0 {
            let hi = (eps / big).min(1.0);
            let eta = 0.5 * (lo + hi);
            let w = UnboundednessWitness { eps, n, k, eta, norm_f: eta * big, norm_f_over_n: eta * small };
            return Ok(w);
        }
        k *= 2.0;
        if !k.is_finite() {
            return Err(Error::InvalidParameter(format!("no witness found for eps = {eps}, N = {n}")));
        }
    }
}

/// `f = (1/n)(f_1 + … + f_n)` with every `‖f_j‖_log < ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexSplit {
    pub n: usize,
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<StepFunction>,
    /// `‖n·f‖_log / n`, the common norm of every piece.
    pub piece_norm: f64,
}

impl ConvexSplit {
    /// `(1/n) Σ f_j`.
    pub fn average(&self) -> Result<StepFunction> {
        let total = self.pieces.first().map_or(TotalMeasure::Finite(1.0), |p| p.total_measure());
        let mut sum = StepFunction::zero(total);
        for p in &self.pieces {
            sum = sum.try_add(p)?;
        }
        Ok(sum.scale((1.0 / self.n as f64).into()))
    }
}

/// Splits `f` on `[0, 1)` into `n` pieces of equal log-norm `< eps`.
///
/// `n` is the least integer with `‖n f‖_log / n < eps`. The cumulative
/// integral of `log(1 + n|f|)` is piecewise linear, so each breakpoint is
/// found exactly by inverting it on the piece where it crosses `j/n` of the
/// total (leftmost crossing); the last breakpoint is 1.
pub fn convex_split(f: &StepFunction, eps: f64) -> Result<ConvexSplit> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if f.total_measure() != TotalMeasure::Finite(1.0) {
        return Err(Error::DomainMismatch(format!(
            "convex split works on [0, 1), got total measure {}",
            f.total_measure()
        )));
    }
    let mut n = 1usize;
    while lognorm(&f.scale((n as f64).into())) / n as f64 >= eps {
        n += 1;
    }
    let nf = n as f64;
    let scaled = f.scale(nf.into());
    let total = lognorm(&scaled);

    let mut breakpoints = vec![0.0];
    let rates: Vec<(Piece, f64)> = scaled.pieces().iter().map(|p| (*p, p.value.norm().ln_1p())).collect();
    let mut idx = 0;
    let mut acc = 0.0;
    for j in 1..n {
        let target = total * j as f64 / nf;
        loop {
            let (p, rate) = rates[idx];
            let end = acc + rate * p.width();
            if end >= target || idx + 1 == rates.len() {
                let x = (p.left + (target - acc) / rate).clamp(p.left, p.right);
                breakpoints.push(x);
                break;
            }
            acc = end;
            idx += 1;
        }
    }
    breakpoints.push(1.0);

    let pieces = breakpoints.windows(2).map(|w| scaled.restrict(w[0], w[1])).collect();
    Ok(ConvexSplit { n, breakpoints, pieces, piece_norm: total / nf })
}

/// `f_k = e^{k²}·χ_[0, 1/k)`: measure of support → 0 while `‖f_k‖_log → ∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationSequence {
    pub k: u32,
    pub support_measure: f64,
    /// `(1/k)·log(1 + e^{k²}) = dominant + correction`.
    pub lognorm_value: f64,
    pub dominant: f64,
    pub correction: f64,
}

impl SeparationSequence {
    /// Height `e^{k²}`; infinite once it leaves the `f64` range (`k ≥ 27`).
    pub fn height(&self) -> f64 {
        ((self.k as f64).powi(2)).exp()
    }

    /// `ν{|f_k| ≥ δ}`.
    pub fn measure_at_least(&self, delta: f64) -> f64 {
        if (self.k as f64).powi(2) >= delta.ln() {
            self.support_measure
        } else {
            0.0
        }
    }

    /// `f_k` as a step function, when its height is finite.
    pub fn function(&self) -> Option<StepFunction> {
        let h = self.height();
        h.is_finite().then(|| {
            StepFunction::indicator(TotalMeasure::Finite(1.0), 0.0, self.support_measure, h.into())
                .expect("support lies in [0, 1)")
        })
    }
}

pub fn separation_sequence(k: u32) -> Result<SeparationSequence> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let kf = k as f64;
    let correction = (-kf * kf).exp().ln_1p() / kf;
    Ok(SeparationSequence { k, support_measure: 1.0 / kf, lognorm_value: kf + correction, dominant: kf, correction })
}

/// Outcome of [`cauchy_limit`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyReport {
    /// `dlog(f_i, f_{i+1})`.
    pub distances: Vec<f64>,
    /// Sum of the distances over the second half of the sequence.
    pub tail_sum: f64,
    pub is_cauchy: bool,
    /// Largest distance in the tail, reported when the sequence is rejected.
    pub gap: Option<f64>,
    /// `dlog(f_last, limit)` when a limit was produced.
    pub last_to_limit: Option<f64>,
}

/// Tests a finite sequence for the Cauchy property and extracts its limit.
///
/// The sequence is declared Cauchy when the distances over its second half
/// sum to less than `tol`. The limit is formed cell by cell on the common
/// refinement: stabilized values are kept, and values still moving
/// geometrically are extrapolated with Aitken's Δ² step.
pub fn cauchy_limit(seq: &[StepFunction], tol: f64) -> Result<(Option<StepFunction>, CauchyReport)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if seq.is_empty() {
        return Err(Error::InvalidParameter("sequence is empty".into()));
    }
    let distances = seq.windows(2).map(|w| dlog(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
    let tail = &distances[distances.len() / 2..];
    let tail_sum: f64 = tail.iter().sum();
    let refs: Vec<&StepFunction> = seq.iter().collect();
    let cells = refine(&refs)?;
    let last = seq.last().expect("nonempty");

    if !(tail_sum < tol) {
        let gap = tail.iter().copied().fold(0.0, f64::max);
        let report = CauchyReport { distances, tail_sum, is_cauchy: false, gap: Some(gap), last_to_limit: None };
        return Ok((None, report));
    }

    let pieces = cells.iter().map(|cell| Piece::new(cell.left, cell.right, cell_limit(&cell.values))).collect();
    let limit = StepFunction::new(last.total_measure(), pieces)?;
    let last_to_limit = dlog(last, &limit)?;
    let report = CauchyReport { distances, tail_sum, is_cauchy: true, gap: None, last_to_limit: Some(last_to_limit) };
    Ok((Some(limit), report))
}

fn cell_limit(values: &[Complex64]) -> Complex64 {
    let n = values.len();
    let c = values[n - 1];
    if n < 3 {
        return c;
    }
    let (a, b) = (values[n - 3], values[n - 2]);
    let (d1, d2) = (b - a, c - b);
    if d2 == Complex64::new(0.0, 0.0) || d1 == Complex64::new(0.0, 0.0) {
        return c;
    }
    let ratio = d2 / d1;
    if ratio.norm() >= 1.0 || ratio == Complex64::new(1.0, 0.0) {
        return c;
    }
    c - d2 * d2 / (d2 - d1)
}
