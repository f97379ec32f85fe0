//! Piecewise-constant functions on `[0, ∞)` and nonincreasing step functions.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Measure of the ambient interval `[0, total)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TotalMeasure {
    Finite(f64),
    Infinite,
}

impl TotalMeasure {
    pub fn finite(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(TotalMeasure::Finite(value))
        } else if value == f64::INFINITY {
            Ok(TotalMeasure::Infinite)
        } else {
            Err(Error::MalformedInput(format!("total measure must be positive, got {value}")))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            TotalMeasure::Finite(v) => v,
            TotalMeasure::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, TotalMeasure::Finite(_))
    }
}

impl fmt::Display for TotalMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TotalMeasure::Finite(v) => write!(f, "{v}"),
            TotalMeasure::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for TotalMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TotalMeasure::Finite(v) => s.serialize_f64(*v),
            TotalMeasure::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for TotalMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => TotalMeasure::finite(v).map_err(serde::de::Error::custom),
            Raw::Text(t) if t == "inf" => Ok(TotalMeasure::Infinite),
            Raw::Text(t) => {
                Err(serde::de::Error::custom(format!("total_measure must be a number or \"inf\", got {t:?}")))
            }
        }
    }
}

/// One constant piece `value · χ_[left, right)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub left: f64,
    pub right: f64,
    pub value: Complex64,
}

impl Piece {
    pub fn new(left: f64, right: f64, value: Complex64) -> Self {
        Piece { left, right, value }
    }

    pub fn real(left: f64, right: f64, value: f64) -> Self {
        Piece::new(left, right, Complex64::new(value, 0.0))
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

/// A complex step function on `[0, total)`, zero off its pieces.
///
/// Values are kept in canonical form: pieces sorted and disjoint, zero pieces
/// dropped, touching pieces with equal value merged. Two step functions are
/// equal a.e. exactly when their canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionJson", into = "StepFunctionJson")]
pub struct StepFunction {
    total: TotalMeasure,
    pieces: Vec<Piece>,
}

impl StepFunction {
    pub fn new(total: TotalMeasure, mut pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            if !(p.left.is_finite() && p.right.is_finite()) || p.left < 0.0 || p.left >= p.right {
                return Err(Error::MalformedInput(format!(
                    "piece [{}, {}) is not a nonempty interval in [0, inf)",
                    p.left, p.right
                )));
            }
            if p.right > total.as_f64() {
                return Err(Error::MalformedInput(format!(
                    "piece [{}, {}) exceeds total measure {total}",
                    p.left, p.right
                )));
            }
            if !(p.value.re.is_finite() && p.value.im.is_finite()) {
                return Err(Error::MalformedInput(format!("piece [{}, {}) has a non-finite value", p.left, p.right)));
            }
        }
        pieces.sort_by(|a, b| a.left.partial_cmp(&b.left).unwrap_or(Ordering::Equal));
        for w in pieces.windows(2) {
            if w[0].right > w[1].left {
                return Err(Error::MalformedInput(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].left, w[0].right, w[1].left, w[1].right
                )));
            }
        }
        Ok(Self::canonical(total, pieces))
    }

    fn canonical(total: TotalMeasure, pieces: Vec<Piece>) -> Self {
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            if p.value == Complex64::new(0.0, 0.0) || p.right <= p.left {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.right == p.left && last.value == p.value => last.right = p.right,
                _ => out.push(p),
            }
        }
        StepFunction { total, pieces: out }
    }

    pub fn zero(total: TotalMeasure) -> Self {
        StepFunction { total, pieces: Vec::new() }
    }

    /// `value · χ_[left, right)` inside `[0, total)`.
    pub fn indicator(total: TotalMeasure, left: f64, right: f64, value: Complex64) -> Result<Self> {
        Self::new(total, vec![Piece::new(left, right, value)])
    }

    /// Convenience constructor from real `(left, right, value)` triples.
    pub fn from_real(total: TotalMeasure, pieces: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(total, pieces.iter().map(|&(l, r, v)| Piece::real(l, r, v)).collect())
    }

    pub fn total_measure(&self) -> TotalMeasure {
        self.total
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Measure of the support.
    pub fn support_measure(&self) -> f64 {
        self.pieces.iter().map(Piece::width).sum()
    }

    pub fn max_modulus(&self) -> f64 {
        self.pieces.iter().map(|p| p.value.norm()).fold(0.0, f64::max)
    }

    pub fn value_at(&self, x: f64) -> Complex64 {
        let idx = self.pieces.partition_point(|p| p.right <= x);
        match self.pieces.get(idx) {
            Some(p) if p.left <= x => p.value,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> StepFunction {
        self.map_values(|v| alpha * v)
    }

    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> StepFunction {
        let pieces = self.pieces.iter().map(|p| Piece::new(p.left, p.right, f(p.value))).collect();
        Self::canonical(self.total, pieces)
    }

    /// Keep only the pieces for which `keep` holds; everything else becomes 0.
    pub fn filter(&self, keep: impl Fn(&Piece) -> bool) -> StepFunction {
        let pieces = self.pieces.iter().copied().filter(|p| keep(p)).collect();
        Self::canonical(self.total, pieces)
    }

    /// Restriction to `[left, right)`.
    pub fn restrict(&self, left: f64, right: f64) -> StepFunction {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let l = p.left.max(left);
                let r = p.right.min(right);
                (l < r).then(|| Piece::new(l, r, p.value))
            })
            .collect();
        Self::canonical(self.total, pieces)
    }

    pub fn try_add(&self, other: &StepFunction) -> Result<StepFunction> {
        pointwise(self, other, PointwiseOp::Add)
    }

    pub fn try_sub(&self, other: &StepFunction) -> Result<StepFunction> {
        pointwise(self, other, PointwiseOp::Sub)
    }

    pub fn try_mul(&self, other: &StepFunction) -> Result<StepFunction> {
        pointwise(self, other, PointwiseOp::Mul)
    }
}

/// Binary pointwise operation on step functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseOp {
    Add,
    Sub,
    Mul,
}

/// Pointwise combination on the merged breakpoint refinement.
pub fn pointwise(f: &StepFunction, g: &StepFunction, op: PointwiseOp) -> Result<StepFunction> {
    let cells = refine(&[f, g])?;
    let pieces = cells
        .into_iter()
        .map(|cell| {
            let (a, b) = (cell.values[0], cell.values[1]);
            let v = match op {
                PointwiseOp::Add => a + b,
                PointwiseOp::Sub => a - b,
                PointwiseOp::Mul => a * b,
            };
            Piece::new(cell.left, cell.right, v)
        })
        .collect();
    Ok(StepFunction::canonical(f.total, pieces))
}

/// One cell of a common refinement, with the value of every input on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub left: f64,
    pub right: f64,
    pub values: Vec<Complex64>,
}

/// Common refinement of several step functions over the union of their
/// supports. Cells where every input vanishes are omitted.
pub fn refine(fs: &[&StepFunction]) -> Result<Vec<Cell>> {
    let Some(first) = fs.first() else {
        return Ok(Vec::new());
    };
    if let Some(other) = fs.iter().find(|g| g.total != first.total) {
        return Err(Error::DomainMismatch(format!("total measures differ: {} vs {}", first.total, other.total)));
    }
    let mut points: Vec<f64> = fs.iter().flat_map(|g| g.pieces.iter().flat_map(|p| [p.left, p.right])).collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    points.dedup();

    let mut cursors = vec![0usize; fs.len()];
    let mut cells = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut any = false;
        let values = fs
            .iter()
            .zip(cursors.iter_mut())
            .map(|(g, c)| {
                while *c < g.pieces.len() && g.pieces[*c].right <= a {
                    *c += 1;
                }
                match g.pieces.get(*c) {
                    Some(p) if p.left <= a => {
                        any = true;
                        p.value
                    }
                    _ => Complex64::new(0.0, 0.0),
                }
            })
            .collect();
        if any {
            cells.push(Cell { left: a, right: b, values });
        }
    }
    Ok(cells)
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    l: f64,
    r: f64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct StepFunctionJson {
    total_measure: TotalMeasure,
    pieces: Vec<PieceJson>,
}

impl TryFrom<StepFunctionJson> for StepFunction {
    type Error = Error;

    fn try_from(raw: StepFunctionJson) -> Result<Self> {
        let pieces = raw.pieces.into_iter().map(|p| Piece::new(p.l, p.r, Complex64::new(p.re, p.im))).collect();
        StepFunction::new(raw.total_measure, pieces)
    }
}

impl From<StepFunction> for StepFunctionJson {
    fn from(f: StepFunction) -> Self {
        StepFunctionJson {
            total_measure: f.total,
            pieces: f
                .pieces
                .iter()
                .map(|p| PieceJson { l: p.left, r: p.right, re: p.value.re, im: p.value.im })
                .collect(),
        }
    }
}

/// A nonincreasing, nonnegative step function on `(0, total]`, stored as
/// `(width, height)` steps with strictly decreasing heights.
///
/// This is the shape of a decreasing rearrangement `|f|*` and of the
/// singular-number function `μ(T)` of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SingularStepJson", into = "SingularStepJson")]
pub struct SingularStep {
    total: TotalMeasure,
    steps: Vec<(f64, f64)>,
}

impl SingularStep {
    pub fn new(total: TotalMeasure, steps: Vec<(f64, f64)>) -> Result<Self> {
        let mut width_sum = 0.0;
        for w in steps.windows(2) {
            if w[1].1 > w[0].1 {
                return Err(Error::MalformedInput(format!(
                    "heights must be nonincreasing, got {} then {}",
                    w[0].1, w[1].1
                )));
            }
        }
        for &(w, h) in &steps {
            if !(w.is_finite() && w >= 0.0 && h.is_finite() && h >= 0.0) {
                return Err(Error::MalformedInput(format!("invalid step (width {w}, height {h})")));
            }
            width_sum += w;
        }
        if width_sum > total.as_f64() * (1.0 + 1e-12) {
            return Err(Error::MalformedInput(format!("steps cover {width_sum}, more than total measure {total}")));
        }
        Ok(Self::canonical(total, steps))
    }

    fn canonical(total: TotalMeasure, steps: Vec<(f64, f64)>) -> Self {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(steps.len());
        for (w, h) in steps {
            if w <= 0.0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.1 == h => last.0 += w,
                _ => out.push((w, h)),
            }
        }
        SingularStep { total, steps: out }
    }

    /// Builds the step function from unsorted `(width, height)` pairs.
    pub(crate) fn from_unsorted(total: TotalMeasure, mut steps: Vec<(f64, f64)>) -> Self {
        steps.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
        Self::canonical(total, steps)
    }

    pub fn total_measure(&self) -> TotalMeasure {
        self.total
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    /// `∫ φ(μ(x)) dx` over the listed steps.
    pub fn integrate(&self, phi: impl Fn(f64) -> f64) -> f64 {
        self.steps.iter().map(|&(w, h)| w * phi(h)).sum()
    }

    /// `∫ log(1 + μ(x)) dx`.
    pub fn log_integral(&self) -> f64 {
        self.integrate(f64::ln_1p)
    }

    /// Measure of `{x : μ(x) ≥ delta}`.
    pub fn measure_at_least(&self, delta: f64) -> f64 {
        self.steps.iter().filter(|s| s.1 >= delta).map(|s| s.0).sum()
    }

    /// Largest height, or 0.
    pub fn sup(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.1)
    }

    /// `x ↦ μ_a(x)·μ_b(x)` on the common refinement of both step layouts.
    pub fn product(&self, other: &SingularStep) -> SingularStep {
        let (mut i, mut j) = (0, 0);
        let (mut rem_a, mut rem_b) =
            (self.steps.first().map_or(0.0, |s| s.0), other.steps.first().map_or(0.0, |s| s.0));
        let mut out = Vec::new();
        while i < self.steps.len() && j < other.steps.len() {
            let w = rem_a.min(rem_b);
            out.push((w, self.steps[i].1 * other.steps[j].1));
            rem_a -= w;
            rem_b -= w;
            if rem_a <= 0.0 {
                i += 1;
                rem_a = self.steps.get(i).map_or(0.0, |s| s.0);
            }
            if rem_b <= 0.0 {
                j += 1;
                rem_b = other.steps.get(j).map_or(0.0, |s| s.0);
            }
        }
        let total = match (self.total, other.total) {
            (TotalMeasure::Finite(a), TotalMeasure::Finite(b)) => TotalMeasure::Finite(a.min(b)),
            (TotalMeasure::Finite(a), _) | (_, TotalMeasure::Finite(a)) => TotalMeasure::Finite(a),
            _ => TotalMeasure::Infinite,
        };
        Self::canonical(total, out)
    }
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    width: f64,
    height: f64,
}

#[derive(Serialize, Deserialize)]
struct SingularStepJson {
    total_measure: TotalMeasure,
    steps: Vec<StepJson>,
}

impl TryFrom<SingularStepJson> for SingularStep {
    type Error = Error;

    fn try_from(raw: SingularStepJson) -> Result<Self> {
        SingularStep::new(raw.total_measure, raw.steps.into_iter().map(|s| (s.width, s.height)).collect())
    }
}

impl From<SingularStep> for SingularStepJson {
    fn from(s: SingularStep) -> Self {
        SingularStepJson {
            total_measure: s.total,
            steps: s.steps.iter().map(|&(width, height)| StepJson { width, height }).collect(),
        }
    }
}
