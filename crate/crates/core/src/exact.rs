//! Exact arithmetic for generator matrices.
//!
//! Elements have the form `a + b·σ` with `a, b ∈ ℚ(√2)` and
//! `σ = √(2 + 2√2)`. The genus-two octagon group needs `σ`; user models
//! are restricted to `ℚ(√2)` entries written as `p+q*sqrt2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `p + q·√2` with rational `p`, `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSqrt2 {
    pub p: BigRational,
    pub q: BigRational,
}

impl QSqrt2 {
    pub fn new(p: BigRational, q: BigRational) -> Self {
        QSqrt2 { p, q }
    }

    pub fn rational(p: BigRational) -> Self {
        QSqrt2 { p, q: BigRational::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.p.to_f64().unwrap_or(f64::NAN) + self.q.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Parses `p`, `q*sqrt2`, `p+q*sqrt2` or `p-q*sqrt2` with `p`, `q` rational
    /// literals such as `3`, `-1/3` or `0.25`.
    pub fn parse(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        // split into signed terms at '+'/'-' that are not leading or exponent signs
        let bytes = s.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut out = QSqrt2::zero();
        for term in terms {
            let (neg, body) = match term.as_bytes()[0] {
                b'+' => (false, &term[1..]),
                b'-' => (true, &term[1..]),
                _ => (false, term),
            };
            let (coeff, radical) = if let Some(c) = body.strip_suffix("*sqrt2") {
                (parse_rational(c)?, true)
            } else if body == "sqrt2" {
                (BigRational::one(), true)
            } else {
                (parse_rational(body)?, false)
            };
            let coeff = if neg { -coeff } else { coeff };
            if radical {
                out.q += coeff;
            } else {
                out.p += coeff;
            }
        }
        Ok(out)
    }

    fn norm(&self) -> BigRational {
        &self.p * &self.p - BigRational::from_integer(2.into()) * &self.q * &self.q
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational literal: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: num_bigint::BigInt = n.parse().map_err(|_| bad())?;
        let d: num_bigint::BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: num_bigint::BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let den = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
        return Ok(BigRational::new(digits, den));
    }
    let n: num_bigint::BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { p: &self.p + &o.p, q: &self.q + &o.q }
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { p: &self.p - &o.p, q: &self.q - &o.q }
    }
}

impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(2.into());
        QSqrt2 { p: &self.p * &o.p + two * &self.q * &o.q, q: &self.p * &o.q + &self.q * &o.p }
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { p: -&self.p, q: -&self.q }
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "{}", self.p)
        } else if self.q.is_negative() {
            write!(f, "{}-{}*sqrt2", self.p, -&self.q)
        } else {
            write!(f, "{}+{}*sqrt2", self.p, self.q)
        }
    }
}

/// `a + b·σ` with `σ² = 2 + 2√2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactReal {
    pub a: QSqrt2,
    pub b: QSqrt2,
}

impl ExactReal {
    pub fn from_base(a: QSqrt2) -> Self {
        ExactReal { a, b: QSqrt2::zero() }
    }

    pub fn new(a: QSqrt2, b: QSqrt2) -> Self {
        ExactReal { a, b }
    }

    pub fn int(n: i64) -> Self {
        Self::from_base(QSqrt2::int(n))
    }

    /// `σ = √(2 + 2√2)` itself.
    pub fn sigma() -> Self {
        ExactReal { a: QSqrt2::zero(), b: QSqrt2::one() }
    }

    fn sigma_squared() -> QSqrt2 {
        QSqrt2::new(BigRational::from_integer(2.into()), BigRational::from_integer(2.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let sigma = (2.0 + 2.0 * std::f64::consts::SQRT_2).sqrt();
        self.a.to_f64() + self.b.to_f64() * sigma
    }

    /// True when the value lies in `ℚ(√2)`.
    pub fn in_base_field(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign for nonzero elements of `ℚ(√2)`; falls back to a float
    /// comparison when `σ` is involved.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if self.in_base_field() {
            return qsqrt2_signum(&self.a);
        }
        if self.to_f64() > 0.0 {
            1
        } else {
            -1
        }
    }
}

fn qsqrt2_signum(x: &QSqrt2) -> i8 {
    // sign of p + q√2 from the signs of p, q and the norm p² - 2q²
    let sp = if x.p.is_zero() { 0 } else if x.p.is_positive() { 1 } else { -1 };
    let sq = if x.q.is_zero() { 0 } else if x.q.is_positive() { 1 } else { -1 };
    if sp == 0 {
        return sq;
    }
    if sq == 0 || sp == sq {
        return sp;
    }
    let n = x.norm();
    if n.is_positive() {
        sp
    } else {
        sq
    }
}

impl Add for &ExactReal {
    type Output = ExactReal;
    fn add(self, o: &ExactReal) -> ExactReal {
        ExactReal { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &ExactReal {
    type Output = ExactReal;
    fn sub(self, o: &ExactReal) -> ExactReal {
        ExactReal { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Mul for &ExactReal {
    type Output = ExactReal;
    fn mul(self, o: &ExactReal) -> ExactReal {
        let bd = &self.b * &o.b;
        ExactReal {
            a: &(&self.a * &o.a) + &(&bd * &ExactReal::sigma_squared()),
            b: &(&self.a * &o.b) + &(&self.b * &o.a),
        }
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal { a: -&self.a, b: -&self.b }
    }
}

/// Exact 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix(pub [ExactReal; 4]);

impl ExactMatrix {
    pub fn identity() -> Self {
        ExactMatrix([ExactReal::int(1), ExactReal::int(0), ExactReal::int(0), ExactReal::int(1)])
    }

    pub fn det(&self) -> ExactReal {
        let [a, b, c, d] = &self.0;
        &(a * d) - &(b * c)
    }

    pub fn trace(&self) -> ExactReal {
        &self.0[0] + &self.0[3]
    }

    pub fn mul(&self, o: &ExactMatrix) -> ExactMatrix {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        ExactMatrix([&(a * e) + &(b * g), &(a * f) + &(b * h), &(c * e) + &(d * g), &(c * f) + &(d * h)])
    }

    /// Adjugate; equals the inverse up to the scalar `det`.
    pub fn adjugate(&self) -> ExactMatrix {
        let [a, b, c, d] = &self.0;
        ExactMatrix([d.clone(), -b, -c, a.clone()])
    }

    /// True when the matrix is a nonzero scalar multiple of the identity,
    /// i.e. it acts trivially on the hyperbolic plane.
    pub fn is_projectively_identity(&self) -> bool {
        let [a, b, c, d] = &self.0;
        b.is_zero() && c.is_zero() && a == d && !a.is_zero()
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64(), self.0[3].to_f64()]
    }
}
