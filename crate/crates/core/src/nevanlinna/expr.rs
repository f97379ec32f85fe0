use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex numbers as `{"re": x, "im": y}` (`im` optional).
pub(crate) mod complex_json {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Cx {
        re: f64,
        #[serde(default)]
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Cx { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let c = Cx::deserialize(d)?;
        Ok(Complex64::new(c.re, c.im))
    }

    pub mod list {
        use super::*;

        pub fn serialize<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(zs.iter().map(|z| Cx { re: z.re, im: z.im }))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            Ok(Vec::<Cx>::deserialize(d)?.into_iter().map(|c| Complex64::new(c.re, c.im)).collect())
        }
    }
}

/// Holomorphic function on the unit disk built from Nevanlinna-class atoms.
///
/// Construction validates the tree: rational denominators have no zeros on
/// the closed disk, Blaschke parameters lie in the open disk, singular inner
/// masses are nonnegative, and every `Div` denominator is a product of
/// Blaschke factors, singular inner functions, and polynomials or rationals
/// that do not vanish on the closed disk. Such a quotient is a ratio of
/// bounded analytic functions, hence in the Nevanlinna class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Node", into = "Node")]
pub struct HoloFunction(Node);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum Node {
    Poly {
        #[serde(with = "complex_json::list")]
        coeffs: Vec<Complex64>,
    },
    Rational {
        #[serde(with = "complex_json::list")]
        num: Vec<Complex64>,
        #[serde(with = "complex_json::list")]
        den: Vec<Complex64>,
    },
    Blaschke {
        #[serde(with = "complex_json")]
        a: Complex64,
    },
    Singular {
        s: f64,
    },
    Add {
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Mul {
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Div {
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
}

impl TryFrom<Node> for HoloFunction {
    type Error = Error;

    fn try_from(node: Node) -> Result<Self> {
        node.validate()?;
        Ok(HoloFunction(node))
    }
}

impl From<HoloFunction> for Node {
    fn from(f: HoloFunction) -> Self {
        f.0
    }
}

impl HoloFunction {
    /// Polynomial `Σ c_k z^k`.
    pub fn polynomial(coeffs: &[Complex64]) -> Result<Self> {
        Node::Poly { coeffs: coeffs.to_vec() }.try_into()
    }

    pub fn real_polynomial(coeffs: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| x.into()).collect();
        Self::polynomial(&c)
    }

    pub fn constant(c: Complex64) -> Self {
        HoloFunction(Node::Poly { coeffs: vec![c] })
    }

    /// `z`.
    pub fn identity() -> Self {
        HoloFunction(Node::Poly { coeffs: vec![0.0.into(), 1.0.into()] })
    }

    /// `num(z)/den(z)` with `den` zero-free on the closed disk.
    pub fn rational(num: &[Complex64], den: &[Complex64]) -> Result<Self> {
        Node::Rational { num: num.to_vec(), den: den.to_vec() }.try_into()
    }

    /// `(z − a)/(1 − ā z)`, `|a| < 1`.
    pub fn blaschke(a: Complex64) -> Result<Self> {
        Node::Blaschke { a }.try_into()
    }

    /// Finite Blaschke product over the given zeros.
    pub fn blaschke_product(zeros: &[Complex64]) -> Result<Self> {
        let mut acc = HoloFunction::constant(1.0.into());
        for &a in zeros {
            acc = acc.mul(&HoloFunction::blaschke(a)?);
        }
        Ok(acc)
    }

    /// `exp(−s(1+z)/(1−z))`, `s ≥ 0`.
    pub fn singular_inner(s: f64) -> Result<Self> {
        Node::Singular { s }.try_into()
    }

    pub fn add(&self, other: &Self) -> Self {
        HoloFunction(Node::Add { lhs: Box::new(self.0.clone()), rhs: Box::new(other.0.clone()) })
    }

    pub fn mul(&self, other: &Self) -> Self {
        HoloFunction(Node::Mul { lhs: Box::new(self.0.clone()), rhs: Box::new(other.0.clone()) })
    }

    /// Tree-level difference `self + (−1)·other`.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&HoloFunction::constant((-1.0).into()).mul(other))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        HoloFunction::constant(c).mul(self)
    }

    /// `self / other`; fails unless `other` is an admissible denominator.
    pub fn div(&self, other: &Self) -> Result<Self> {
        Node::Div { lhs: Box::new(self.0.clone()), rhs: Box::new(other.0.clone()) }.try_into()
    }

    /// `f(z)` for `|z| ≤ 1`. The result may overflow to infinity for values
    /// beyond the `f64` range; [`HoloFunction::log1p_abs`] does not.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_in_disk(z)?;
        Ok(self.0.eval(z)?.value())
    }

    /// `log(1 + |f(z)|)`, evaluated in log-scaled arithmetic.
    pub fn log1p_abs(&self, z: Complex64) -> Result<f64> {
        check_in_disk(z)?;
        Ok(softplus(self.0.eval(z)?.ln_abs()))
    }

    pub(crate) fn log1p_abs_unchecked(&self, z: Complex64) -> Result<f64> {
        Ok(softplus(self.0.eval(z)?.ln_abs()))
    }
}

impl fmt::Display for HoloFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Poly { coeffs } => write!(f, "poly{coeffs:?}"),
            Node::Rational { num, den } => write!(f, "rational({num:?}/{den:?})"),
            Node::Blaschke { a } => write!(f, "blaschke({a})"),
            Node::Singular { s } => write!(f, "singular({s})"),
            Node::Add { lhs, rhs } => write!(f, "({lhs} + {rhs})"),
            Node::Mul { lhs, rhs } => write!(f, "({lhs} * {rhs})"),
            Node::Div { lhs, rhs } => write!(f, "({lhs} / {rhs})"),
        }
    }
}

fn check_in_disk(z: Complex64) -> Result<()> {
    if z.norm() <= 1.0 + 1e-12 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("|z| = {} exceeds 1", z.norm())))
    }
}

/// `log(1 + e^x)`, stable for all `x` including `±∞`.
pub(crate) fn softplus(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `mantissa · e^{scale}`; keeps moduli like `exp(2^23)` representable.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    mantissa: Complex64,
    scale: f64,
}

impl Scaled {
    fn plain(v: Complex64) -> Self {
        Scaled { mantissa: v, scale: 0.0 }
    }

    fn is_zero(self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    fn value(self) -> Complex64 {
        self.mantissa * self.scale.exp()
    }

    fn ln_abs(self) -> f64 {
        self.mantissa.norm().ln() + self.scale
    }

    fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let s = self.scale.max(other.scale);
        Scaled { mantissa: self.mantissa * (self.scale - s).exp() + other.mantissa * (other.scale - s).exp(), scale: s }
    }

    fn mul(self, other: Scaled) -> Scaled {
        Scaled { mantissa: self.mantissa * other.mantissa, scale: self.scale + other.scale }
    }

    fn div(self, other: Scaled) -> Scaled {
        Scaled { mantissa: self.mantissa / other.mantissa, scale: self.scale - other.scale }
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

impl Node {
    fn eval(&self, z: Complex64) -> Result<Scaled> {
        Ok(match self {
            Node::Poly { coeffs } => Scaled::plain(horner(coeffs, z)),
            Node::Rational { num, den } => Scaled::plain(horner(num, z) / horner(den, z)),
            Node::Blaschke { a } => {
                let den = Complex64::new(1.0, 0.0) - a.conj() * z;
                if den == Complex64::new(0.0, 0.0) {
                    return Err(self.singularity(z));
                }
                Scaled::plain((z - a) / den)
            }
            Node::Singular { s } => {
                if *s == 0.0 {
                    return Ok(Scaled::plain(1.0.into()));
                }
                let gap = Complex64::new(1.0, 0.0) - z;
                if gap == Complex64::new(0.0, 0.0) {
                    return Err(self.singularity(z));
                }
                let w = (Complex64::new(1.0, 0.0) + z) / gap;
                Scaled { mantissa: Complex64::from_polar(1.0, -s * w.im), scale: -s * w.re }
            }
            Node::Add { lhs, rhs } => lhs.eval(z)?.add(rhs.eval(z)?),
            Node::Mul { lhs, rhs } => lhs.eval(z)?.mul(rhs.eval(z)?),
            Node::Div { lhs, rhs } => {
                let d = rhs.eval(z)?;
                if d.is_zero() {
                    return Err(rhs.singularity(z));
                }
                lhs.eval(z)?.div(d)
            }
        })
    }

    fn singularity(&self, z: Complex64) -> Error {
        Error::Singularity { atom: self.to_string(), re: z.re, im: z.im }
    }

    fn validate(&self) -> Result<()> {
        let finite = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        match self {
            Node::Poly { coeffs } => {
                if coeffs.is_empty() || !coeffs.iter().all(finite) {
                    return Err(Error::MalformedInput("polynomial needs finite coefficients".into()));
                }
            }
            Node::Rational { num, den } => {
                if num.is_empty() || !num.iter().chain(den).all(finite) {
                    return Err(Error::MalformedInput("rational needs finite coefficients".into()));
                }
                if !zero_free_on_closed_disk(den) {
                    return Err(Error::InvalidParameter(format!(
                        "denominator {den:?} vanishes on the closed unit disk"
                    )));
                }
            }
            Node::Blaschke { a } => {
                if !finite(a) || a.norm() >= 1.0 {
                    return Err(Error::InvalidParameter(format!("Blaschke zero {a} must satisfy |a| < 1")));
                }
            }
            Node::Singular { s } => {
                if !(s.is_finite() && *s >= 0.0) {
                    return Err(Error::InvalidParameter(format!("singular mass {s} must be finite and >= 0")));
                }
            }
            Node::Add { lhs, rhs } | Node::Mul { lhs, rhs } => {
                lhs.validate()?;
                rhs.validate()?;
            }
            Node::Div { lhs, rhs } => {
                lhs.validate()?;
                rhs.validate()?;
                if !rhs.is_admissible_denominator() {
                    return Err(Error::InvalidParameter(format!(
                        "denominator {rhs} is not a product of Blaschke, singular inner, or zero-free factors"
                    )));
                }
            }
        }
        Ok(())
    }

    fn is_admissible_denominator(&self) -> bool {
        match self {
            Node::Blaschke { .. } | Node::Singular { .. } => true,
            Node::Poly { coeffs } => zero_free_on_closed_disk(coeffs),
            Node::Rational { num, .. } => zero_free_on_closed_disk(num),
            Node::Mul { lhs, rhs } => lhs.is_admissible_denominator() && rhs.is_admissible_denominator(),
            Node::Add { .. } | Node::Div { .. } => false,
        }
    }
}

/// Whether `p` has no zeros in `|z| ≤ 1`.
///
/// Equivalent to the reversed conjugate polynomial `z^n p̄(1/z)` having every
/// zero strictly inside the disk, which the Schur–Cohn recursion decides.
pub fn zero_free_on_closed_disk(p: &[Complex64]) -> bool {
    let degree = match p.iter().rposition(|c| c.norm() != 0.0) {
        Some(d) => d,
        None => return false,
    };
    if p[0].norm() == 0.0 {
        return false;
    }
    let reversed: Vec<Complex64> = (0..=degree).map(|k| p[degree - k].conj()).collect();
    schur_stable(reversed)
}

/// Whether every zero of `a` lies in the open unit disk.
fn schur_stable(mut a: Vec<Complex64>) -> bool {
    loop {
        while a.len() > 1 && a.last().is_some_and(|c| c.norm() == 0.0) {
            a.pop();
        }
        let n = a.len() - 1;
        if n == 0 {
            return a[0].norm() != 0.0;
        }
        let (lead, constant) = (a[n], a[0]);
        if constant.norm() >= lead.norm() * (1.0 - 1e-12) {
            return false;
        }
        // (conj(a_n)·a(z) − a_0·a*(z)) / z, with a*(z) = z^n conj(a(1/conj z))
        a = (1..=n).map(|k| lead.conj() * a[k] - constant * a[n - k].conj()).collect();
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::E;

    use approx::assert_abs_diff_eq;

    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        let one = HoloFunction::real_polynomial(&[1.0]).unwrap();
        assert_eq!(one.eval(Complex64::new(0.3, -0.2)).unwrap(), c(1.0));
        let b = HoloFunction::blaschke(c(0.5)).unwrap();
        assert_eq!(b.eval(c(0.5)).unwrap(), c(0.0));
        let s = HoloFunction::singular_inner(1.0).unwrap();
        assert_abs_diff_eq!(s.eval(c(0.0)).unwrap().re, (-1f64).exp(), epsilon = 1e-16);
    }

    #[test]
    fn singular_inner_boundary_point_is_an_error() {
        let s = HoloFunction::singular_inner(1.0).unwrap();
        match s.eval(c(1.0)) {
            Err(Error::Singularity { atom, .. }) => assert!(atom.contains("singular")),
            other => panic!("expected singularity, got {other:?}"),
        }
        assert!(s.eval(c(1.5)).is_err());
    }

    #[test]
    fn log_scaled_evaluation_survives_overflow() {
        // 1/S(1) at r = 1 − 2^{-22}: |f| = exp((1+r)/(1−r)) ≈ exp(2^23)
        let f = HoloFunction::constant(c(1.0)).div(&HoloFunction::singular_inner(1.0).unwrap()).unwrap();
        let r = 1.0 - 2f64.powi(-22);
        let expect = (1.0 + r) / (1.0 - r);
        assert_abs_diff_eq!(f.log1p_abs(c(r)).unwrap(), expect, epsilon = 1e-6 * expect);
        assert!(f.eval(c(r)).unwrap().re.is_infinite());
        assert_abs_diff_eq!(f.log1p_abs(c(0.0)).unwrap(), E.ln_1p(), epsilon = 1e-15);
    }

    #[test]
    fn softplus_limits() {
        assert_eq!(softplus(f64::NEG_INFINITY), 0.0);
        assert_eq!(softplus(1e6), 1e6);
        assert_abs_diff_eq!(softplus(0.0), 2f64.ln(), epsilon = 1e-16);
    }

    #[test]
    fn schur_cohn_zero_free_test() {
        assert!(zero_free_on_closed_disk(&[c(1.0), c(-0.9)]));
        assert!(!zero_free_on_closed_disk(&[c(1.0), c(-1.0)]));
        assert!(!zero_free_on_closed_disk(&[c(-0.5), c(1.0)]));
        assert!(zero_free_on_closed_disk(&[c(3.0)]));
        assert!(!zero_free_on_closed_disk(&[c(0.0)]));
        // (z − 2)(z + 3i) = z² + (3i − 2)z − 6i
        assert!(zero_free_on_closed_disk(&[Complex64::new(0.0, -6.0), Complex64::new(-2.0, 3.0), c(1.0)]));
        // (z − 2)(z − 0.5i)
        let p = [Complex64::new(0.0, 1.0), Complex64::new(-2.0, -0.5), c(1.0)];
        assert!(!zero_free_on_closed_disk(&p));
        // trailing zero coefficients do not change the degree
        assert!(zero_free_on_closed_disk(&[c(2.0), c(1.0), c(0.0)]));
    }

    #[test]
    fn validation_rejects_bad_atoms() {
        assert!(HoloFunction::blaschke(c(1.0)).is_err());
        assert!(HoloFunction::singular_inner(-1.0).is_err());
        assert!(HoloFunction::rational(&[c(1.0)], &[c(1.0), c(-1.0)]).is_err());
        assert!(HoloFunction::polynomial(&[]).is_err());
        let z = HoloFunction::identity();
        assert!(HoloFunction::constant(c(1.0)).div(&z).is_err());
        assert!(HoloFunction::constant(c(1.0)).div(&z.add(&HoloFunction::constant(c(2.0)))).is_err());
        let ok = HoloFunction::singular_inner(1.0).unwrap().mul(&HoloFunction::blaschke(c(0.2)).unwrap());
        assert!(HoloFunction::constant(c(1.0)).div(&ok).is_ok());
        assert!(HoloFunction::constant(c(1.0)).div(&HoloFunction::real_polynomial(&[2.0, 1.0]).unwrap()).is_ok());
    }

    #[test]
    fn json_tree() {
        let json = r#"{"op":"div","lhs":{"op":"poly","coeffs":[{"re":1}]},"rhs":{"op":"singular","s":1.0}}"#;
        let f: HoloFunction = serde_json::from_str(json).unwrap();
        let back: HoloFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"op":"blaschke","a":{"re":1.5,"im":0}}"#;
        assert!(serde_json::from_str::<HoloFunction>(bad).is_err());
    }
}
