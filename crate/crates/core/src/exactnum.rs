//! Exact arithmetic in real quadratic fields `Q(sqrt(m))`.
//!
//! Every comparison in this module is decided by integer arithmetic. The
//! decimal approximations produced by [`QuadNum::approx`] exist for reports
//! only and never feed back into a verdict.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision fraction, always in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("the quadratic has no real root")]
    NoRealRoot,
    #[error("every real root is non-positive")]
    NoPositiveRoot,
    #[error("cannot combine sqrt({0}) with sqrt({1})")]
    MixedRadicands(BigInt, BigInt),
    #[error("radicand {0} is negative")]
    NegativeRadicand(BigInt),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse quadratic number {0:?}")]
    Parse(String),
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`; panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Splits `n > 0` as `n = k^2 * m` with `m` square-free.
///
/// Values below `2^128` are factored outright. Larger ones use trial
/// division up to the cube root of the unfactored cofactor; what remains
/// then has at most two prime factors, so it is either a perfect square or
/// square-free.
pub fn square_free_decompose(n: &BigUint) -> (BigUint, BigUint) {
    assert!(!n.is_zero(), "square-free part of zero is undefined");
    if let Some(small) = n.to_u128() {
        let (k, m) = square_free_decompose_u128(small);
        return (BigUint::from(k), BigUint::from(m));
    }
    let mut k = BigUint::one();
    let mut m = BigUint::one();
    let mut rest = n.clone();
    let mut p: u64 = 2;
    loop {
        let p3 = BigUint::from(p).pow(3);
        if p3 > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            k *= BigUint::from(p).pow(e / 2);
            if e % 2 == 1 {
                m *= p;
            }
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        k *= root;
    } else {
        m *= rest;
    }
    (k, m)
}

fn square_free_decompose_u128(n: u128) -> (u128, u128) {
    let (mut k, mut m) = (1u128, 1u128);
    for (p, e) in num_prime::nt_funcs::factorize128(n) {
        k *= p.pow(e as u32 / 2);
        if e % 2 == 1 {
            m *= p;
        }
    }
    (k, m)
}

/// Exact integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Exact rational square root when `q` is the square of a rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let num = exact_sqrt(q.numer())?;
    let den = exact_sqrt(q.denom())?;
    Some(Rational::new(num, den))
}

/// An element `a + b*sqrt(m)` of a real quadratic field.
///
/// The radicand is square-free; rational values carry `b = 0, m = 0`, so
/// structural equality coincides with numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadNum {
    a: Rational,
    b: Rational,
    m: BigInt,
}

impl QuadNum {
    pub fn from_rational(a: Rational) -> Self {
        QuadNum {
            a,
            b: Rational::zero(),
            m: BigInt::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    /// Builds `a + b*sqrt(radicand)`, pulling square factors of the radicand
    /// into `b`.
    pub fn new(a: Rational, b: Rational, radicand: BigInt) -> Result<Self, ExactError> {
        if radicand.is_negative() {
            return Err(ExactError::NegativeRadicand(radicand));
        }
        if b.is_zero() || radicand.is_zero() {
            return Ok(Self::from_rational(a));
        }
        let (k, m) = square_free_decompose(radicand.magnitude());
        let b = b * Rational::from_integer(BigInt::from(k));
        if m.is_one() {
            return Ok(Self::from_rational(a + b));
        }
        Ok(QuadNum {
            a,
            b,
            m: BigInt::from(m),
        })
    }

    /// `sqrt(n)` for a non-negative integer `n`.
    pub fn sqrt(n: impl Into<BigInt>) -> Result<Self, ExactError> {
        Self::new(Rational::zero(), Rational::one(), n.into())
    }

    /// `sqrt(q)` for a non-negative rational, factoring numerator and
    /// denominator separately.
    pub fn sqrt_rational(q: &Rational) -> Result<Self, ExactError> {
        if q.is_negative() {
            return Err(ExactError::NegativeRadicand(q.numer().clone()));
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        let (kn, mn) = square_free_decompose(q.numer().magnitude());
        let (kd, md) = square_free_decompose(q.denom().magnitude());
        // sqrt(kn^2 mn / (kd^2 md)) = kn / (kd md) * sqrt(mn md)
        let b = Rational::new(BigInt::from(kn), BigInt::from(kd) * BigInt::from(md.clone()));
        let m = mn * md;
        if m.is_one() {
            return Ok(Self::from_rational(b));
        }
        Ok(QuadNum {
            a: Rational::zero(),
            b,
            m: BigInt::from(m),
        })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// Square-free radicand, `0` for rational values.
    pub fn radicand(&self) -> &BigInt {
        &self.m
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn conj(&self) -> Self {
        QuadNum {
            a: self.a.clone(),
            b: -&self.b,
            m: self.m.clone(),
        }
    }

    /// Field norm `a^2 - m b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.m.clone())
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        QuadNum {
            a: &self.a * k,
            b: &self.b * k,
            m: self.m.clone(),
        }
    }

    /// Radicand shared by `self` and `other`, treating rationals as compatible
    /// with anything.
    fn common_radicand(&self, other: &Self) -> Result<BigInt, ExactError> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Ok(other.m.clone()),
            (_, true) => Ok(self.m.clone()),
            _ if self.m == other.m => Ok(self.m.clone()),
            _ => Err(ExactError::MixedRadicands(self.m.clone(), other.m.clone())),
        }
    }

    fn with_parts(a: Rational, b: Rational, m: BigInt) -> Self {
        if b.is_zero() {
            Self::from_rational(a)
        } else {
            QuadNum { a, b, m }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        let m = self.common_radicand(other)?;
        Ok(Self::with_parts(&self.a + &other.a, &self.b + &other.b, m))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        let m = self.common_radicand(other)?;
        let mq = Rational::from_integer(m.clone());
        let a = &self.a * &other.a + &self.b * &other.b * mq;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::with_parts(a, b, m))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        let n = other.norm();
        if n.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(self.checked_mul(&other.conj())?.scale(&n.recip()))
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        QuadNum::from_int(1).checked_div(self)
    }

    /// Sign of the real number `a + b*sqrt(m)`.
    ///
    /// Same-signed terms decide immediately; opposite signs compare `a^2`
    /// against `b^2 m`, which cannot tie for a square-free `m > 1`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (s, Ordering::Equal) | (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            _ => {
                let a2 = &self.a * &self.a;
                let b2m = &self.b * &self.b * Rational::from_integer(self.m.clone());
                match a2.cmp(&b2m) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, ExactError> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// Rational `lo` with `lo <= self` and `self - lo < 2^-bits`.
    pub fn lower_bound(&self, bits: u32) -> Rational {
        if self.is_rational() {
            return self.a.clone();
        }
        // b*sqrt(m) = sign(b) * sqrt(b^2 m); floor the scaled root and round
        // toward -inf on the negative side.
        let scale = BigInt::one() << bits;
        let b2m = &self.b * &self.b * Rational::from_integer(self.m.clone());
        let scaled = (b2m * Rational::from_integer(&scale * &scale)).floor().to_integer();
        let root = scaled.sqrt();
        let radical = if self.b.is_positive() {
            Rational::new(root, scale.clone())
        } else {
            -Rational::new(root + 1, scale.clone())
        };
        let lo = &self.a + radical;
        debug_assert!(QuadNum::from_rational(lo.clone()).try_cmp(self) == Ok(Ordering::Less));
        lo
    }

    /// Decimal approximation with `sig` significant digits. Display only.
    pub fn approx(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let ten = BigInt::from(10);
        let mut places: u32 = 20;
        loop {
            let p = ten.pow(places);
            let scaled_root = if self.is_rational() {
                BigInt::zero()
            } else {
                (&self.m * &p * &p).sqrt()
            };
            let v = &self.a * Rational::from_integer(p.clone())
                + &self.b * Rational::from_integer(scaled_root);
            let v = v.round().to_integer();
            let slack = self.b.abs().ceil().to_integer() + 2;
            let threshold = ten.pow(sig as u32 + 3) * slack;
            if v.abs() >= threshold || places > 4000 {
                return format_scaled(&v, places, sig);
            }
            places *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.approx(17).parse().unwrap_or(f64::NAN)
    }
}

/// Formats the integer `v * 10^-places` with `sig` significant digits.
fn format_scaled(v: &BigInt, places: u32, sig: usize) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let neg = v.sign() == Sign::Minus;
    let digits = v.magnitude().to_str_radix(10);
    let mut exp10 = digits.len() as i64 - places as i64 - 1;
    let mut kept: Vec<u8> = digits.bytes().map(|c| c - b'0').collect();
    if kept.len() > sig {
        let round_up = kept[sig] >= 5;
        kept.truncate(sig);
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    kept.insert(0, 1);
                    kept.truncate(sig);
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if kept[i] == 9 {
                    kept[i] = 0;
                } else {
                    kept[i] += 1;
                    break;
                }
            }
        }
    }
    while kept.len() > 1 && *kept.last().unwrap() == 0 {
        kept.pop();
    }
    let body: String = kept.iter().map(|d| char::from(b'0' + d)).collect();
    let sign = if neg { "-" } else { "" };
    if (-5..=(sig as i64 - 1)).contains(&exp10) {
        let s = if exp10 < 0 {
            format!("0.{}{}", "0".repeat((-exp10 - 1) as usize), body)
        } else {
            let int_len = exp10 as usize + 1;
            if body.len() <= int_len {
                format!("{}{}", body, "0".repeat(int_len - body.len()))
            } else {
                format!("{}.{}", &body[..int_len], &body[int_len..])
            }
        };
        format!("{sign}{s}")
    } else {
        let (head, tail) = body.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp10}")
        } else {
            format!("{sign}{head}.{tail}e{exp10}")
        }
    }
}

impl fmt::Display for QuadNum {
    /// Exact form `a + b*sqrt(m)`; the rational part is omitted when zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let mag = self.b.abs();
        let radical = if mag.is_one() {
            format!("sqrt({})", self.m)
        } else {
            format!("{}*sqrt({})", mag, self.m)
        };
        let neg = self.b.is_negative();
        match (self.a.is_zero(), neg) {
            (true, false) => write!(f, "{radical}"),
            (true, true) => write!(f, "-{radical}"),
            (false, false) => write!(f, "{} + {}", self.a, radical),
            (false, true) => write!(f, "{} - {}", self.a, radical),
        }
    }
}

impl FromStr for QuadNum {
    type Err = ExactError;

    /// Parses the output of `Display` (whitespace-insensitive).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_q = |t: &str| Rational::from_str(t).map_err(|_| bad());
        let Some(at) = compact.find("sqrt(") else {
            return Ok(QuadNum::from_rational(parse_q(&compact)?));
        };
        let radicand = compact[at + 5..].strip_suffix(')').ok_or_else(bad)?;
        let radicand = BigInt::from_str(radicand).map_err(|_| bad())?;
        let prefix = &compact[..at];
        let (rational_part, signed_coef) = match prefix.strip_suffix('*') {
            Some(head) => match head.rfind(['+', '-']).filter(|&k| k > 0) {
                Some(k) => (&head[..k], head[k..].to_string()),
                None => ("", head.to_string()),
            },
            None => match prefix.chars().last() {
                Some(c @ ('+' | '-')) => (&prefix[..prefix.len() - 1], format!("{c}1")),
                None => ("", "1".to_string()),
                Some(_) => return Err(bad()),
            },
        };
        let a = if rational_part.is_empty() {
            Rational::zero()
        } else {
            parse_q(rational_part)?
        };
        let b = parse_q(signed_coef.trim_start_matches('+'))?;
        QuadNum::new(a, b, radicand)
    }
}

#[derive(Serialize, Deserialize)]
struct QuadNumRepr {
    exact: String,
    approx: String,
}

impl Serialize for QuadNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QuadNumRepr {
            exact: self.to_string(),
            approx: self.approx(12),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuadNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = QuadNumRepr::deserialize(deserializer)?;
        repr.exact.parse().map_err(D::Error::custom)
    }
}

impl PartialOrd for QuadNum {
    /// `None` exactly when both sides are irrational with different radicands.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

impl From<Rational> for QuadNum {
    fn from(q: Rational) -> Self {
        QuadNum::from_rational(q)
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::with_parts(-&self.a, -&self.b, self.m.clone())
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

// The operator impls panic on mixed radicands; use the `checked_*` methods
// when operands may come from different fields.
macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                self.$checked(rhs).expect("mixed radicands")
            }
        }
        impl $trait<QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                (&self).$checked(&rhs).expect("mixed radicands")
            }
        }
        impl $trait<&QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                (&self).$checked(rhs).expect("mixed radicands")
            }
        }
        impl $trait<&Rational> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &Rational) -> QuadNum {
                self.$checked(&QuadNum::from_rational(rhs.clone())).expect("rational operand")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

/// Exact ordering of `x` and `y`.
pub fn cmp(x: &QuadNum, y: &QuadNum) -> Result<Ordering, ExactError> {
    x.try_cmp(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    TwoReal,
    Double,
    Linear,
    NoReal,
    DegenerateAllZero,
}

/// Real roots of `A x^2 + B x + C`, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadRoots {
    pub kind: RootKind,
    pub roots: Vec<QuadNum>,
}

impl QuadRoots {
    fn none(kind: RootKind) -> Self {
        QuadRoots {
            kind,
            roots: Vec::new(),
        }
    }
}

/// All real roots of `a x^2 + b x + c = 0`.
///
/// `0 = 0` is reported as [`RootKind::DegenerateAllZero`] and a nonzero
/// constant as [`RootKind::NoReal`].
pub fn quad_roots(a: &Rational, b: &Rational, c: &Rational) -> QuadRoots {
    if a.is_zero() {
        return match (b.is_zero(), c.is_zero()) {
            (true, true) => QuadRoots::none(RootKind::DegenerateAllZero),
            (true, false) => QuadRoots::none(RootKind::NoReal),
            _ => QuadRoots {
                kind: RootKind::Linear,
                roots: vec![QuadNum::from_rational(-c / b)],
            },
        };
    }
    let disc = b * b - rat(4) * a * c;
    let two_a = a * rat(2);
    match disc.cmp(&Rational::zero()) {
        Ordering::Less => QuadRoots::none(RootKind::NoReal),
        Ordering::Equal => QuadRoots {
            kind: RootKind::Double,
            roots: vec![QuadNum::from_rational(-b / &two_a)],
        },
        Ordering::Greater => {
            // sqrt(n/q) = sqrt(n q) / q
            let q = disc.denom().clone();
            let nq = disc.numer() * &q;
            let root = QuadNum::new(Rational::zero(), Rational::new(BigInt::one(), q), nq)
                .expect("positive discriminant");
            let center = QuadNum::from_rational(-b / &two_a);
            let half = root.scale(&two_a.recip());
            let mut roots = vec![&center - &half, &center + &half];
            roots.sort_by(|x, y| x.try_cmp(y).expect("roots share a radicand"));
            QuadRoots {
                kind: RootKind::TwoReal,
                roots,
            }
        }
    }
}

/// Smallest strictly positive root.
pub fn min_positive_root(roots: &QuadRoots) -> Result<QuadNum, ExactError> {
    match roots.kind {
        RootKind::NoReal | RootKind::DegenerateAllZero => Err(ExactError::NoRealRoot),
        _ => roots
            .roots
            .iter()
            .find(|r| r.is_positive())
            .cloned()
            .ok_or(ExactError::NoPositiveRoot),
    }
}

/// Exact value of `a x^2 + b x + c`.
pub fn eval_quadratic(a: &Rational, b: &Rational, c: &Rational, x: &QuadNum) -> QuadNum {
    let ax = x.scale(a);
    let inner = &ax + b;
    &(&inner * x) + c
}

/// Approximate value of a rational, for display.
pub fn approx_rational(q: &Rational, sig: usize) -> String {
    QuadNum::from_rational(q.clone()).approx(sig)
}

/// Largest integer `<= q`.
pub fn floor_int(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qn(a: i64, b: i64, m: i64) -> QuadNum {
        QuadNum::new(rat(a), rat(b), BigInt::from(m)).unwrap()
    }

    #[test]
    fn double_root_at_four() {
        let r = quad_roots(&rat(1), &rat(-8), &rat(16));
        assert_eq!(r.kind, RootKind::Double);
        assert_eq!(r.roots, vec![QuadNum::from_int(4)]);
        assert!(eval_quadratic(&rat(1), &rat(-8), &rat(16), &r.roots[0]).is_zero());
    }

    #[test]
    fn rational_square_roots() {
        let r = QuadNum::sqrt_rational(&frac(9, 8)).unwrap();
        assert_eq!(r, QuadNum::new(rat(0), frac(3, 4), BigInt::from(2)).unwrap());
        assert_eq!(QuadNum::sqrt_rational(&frac(4, 9)).unwrap(), QuadNum::from_rational(frac(2, 3)));
        assert_eq!(QuadNum::sqrt_rational(&frac(7, 3)).unwrap().radicand(), &BigInt::from(21));
        assert!(QuadNum::sqrt_rational(&frac(-1, 3)).is_err());
    }

    #[test]
    fn linear_root() {
        let r = quad_roots(&rat(0), &rat(-6), &rat(18));
        assert_eq!(r.kind, RootKind::Linear);
        assert_eq!(r.roots, vec![QuadNum::from_int(3)]);
    }

    #[test]
    fn irrational_pair() {
        let r = quad_roots(&rat(1), &rat(-14), &rat(28));
        assert_eq!(r.kind, RootKind::TwoReal);
        assert_eq!(r.roots, vec![qn(7, -1, 21), qn(7, 1, 21)]);
        for x in &r.roots {
            assert!(eval_quadratic(&rat(1), &rat(-14), &rat(28), x).is_zero());
        }
        assert_eq!(min_positive_root(&r).unwrap(), qn(7, -1, 21));
    }

    #[test]
    fn negative_leading_coefficient_sorted() {
        let r = quad_roots(&rat(-1), &rat(0), &rat(2));
        assert_eq!(r.roots, vec![qn(0, -1, 2), qn(0, 1, 2)]);
    }

    #[test]
    fn degenerate_cases() {
        assert_eq!(quad_roots(&rat(1), &rat(0), &rat(1)).kind, RootKind::NoReal);
        assert_eq!(quad_roots(&rat(0), &rat(0), &rat(5)).kind, RootKind::NoReal);
        let z = quad_roots(&rat(0), &rat(0), &rat(0));
        assert_eq!(z.kind, RootKind::DegenerateAllZero);
        assert!(z.roots.is_empty());
        assert_eq!(min_positive_root(&z), Err(ExactError::NoRealRoot));
    }

    #[test]
    fn rational_discriminant_with_denominator() {
        // 4x^2 - 4x - 1: disc 32, roots (1 +- sqrt 2)/2
        let r = quad_roots(&rat(4), &rat(-4), &rat(-1));
        assert_eq!(r.roots[0], QuadNum::new(frac(1, 2), frac(-1, 2), 2.into()).unwrap());
        // x^2 - x/3 - 1/3: disc 1/9 + 4/3 = 13/9
        let r = quad_roots(&rat(1), &frac(-1, 3), &frac(-1, 3));
        assert_eq!(r.roots[1], QuadNum::new(frac(1, 6), frac(1, 6), 13.into()).unwrap());
    }

    #[test]
    fn min_positive_picks_smallest_positive() {
        let r = quad_roots(&rat(1), &rat(-1), &rat(-6)); // roots -2, 3
        assert_eq!(min_positive_root(&r).unwrap(), QuadNum::from_int(3));
        let r = quad_roots(&rat(1), &rat(3), &rat(2)); // -2, -1
        assert_eq!(min_positive_root(&r), Err(ExactError::NoPositiveRoot));
    }

    #[test]
    fn comparisons() {
        assert_eq!(cmp(&qn(0, 1, 21), &QuadNum::from_rational(frac(13, 3))), Ok(Ordering::Greater));
        assert_eq!(cmp(&qn(3, 0, 5), &QuadNum::from_int(3)), Ok(Ordering::Equal));
        assert_eq!(cmp(&qn(7, -1, 21), &QuadNum::from_rational(frac(5, 2))), Ok(Ordering::Less));
        assert_eq!(
            cmp(&qn(0, 1, 2), &qn(0, 1, 3)),
            Err(ExactError::MixedRadicands(2.into(), 3.into()))
        );
    }

    #[test]
    fn eval_examples() {
        let x = qn(0, 1, 2);
        assert_eq!(eval_quadratic(&rat(1), &rat(0), &rat(0), &x), QuadNum::from_int(2));
        assert_eq!(eval_quadratic(&rat(1), &rat(-8), &rat(16), &QuadNum::from_int(3)), QuadNum::from_int(1));
    }

    #[test]
    fn canonicalization_pulls_squares() {
        assert_eq!(qn(1, 1, 12), qn(1, 2, 3));
        assert_eq!(qn(1, 3, 49), QuadNum::from_int(22));
        assert_eq!(qn(0, 1, 1), QuadNum::from_int(1));
        assert!(QuadNum::sqrt(-3).is_err());
    }

    #[test]
    fn square_free_large_cofactor() {
        // 3 * 1000003^2: the cofactor after trial division is a prime square
        let n = BigUint::from(3u32) * BigUint::from(1_000_003u64).pow(2);
        let (k, m) = square_free_decompose(&n);
        assert_eq!(k, BigUint::from(1_000_003u64));
        assert_eq!(m, BigUint::from(3u32));
        let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64) * 4u32;
        let (k, m) = square_free_decompose(&n);
        assert_eq!(k, BigUint::from(2u32));
        assert_eq!(m, BigUint::from(1_000_003u64 * 1_000_033u64));
    }

    #[test]
    fn display_and_parse() {
        let cases = [qn(7, -1, 21), qn(0, 1, 13), qn(0, -3, 2), QuadNum::from_rational(frac(-7, 2)),
            QuadNum::new(frac(1, 2), frac(-3, 4), 5.into()).unwrap()];
        let texts = ["7 - sqrt(21)", "sqrt(13)", "-3*sqrt(2)", "-7/2", "1/2 - 3/4*sqrt(5)"];
        for (x, t) in cases.iter().zip(texts) {
            assert_eq!(x.to_string(), t);
            assert_eq!(&t.parse::<QuadNum>().unwrap(), x);
        }
        assert_eq!("-182+42*sqrt(21)".parse::<QuadNum>().unwrap(), qn(-182, 42, 21));
        assert!("7 sqrt(2)".parse::<QuadNum>().is_err());
    }

    #[test]
    fn approximations() {
        assert_eq!(qn(7, -1, 21).approx(12), "2.41742430504");
        assert_eq!(QuadNum::from_int(4).approx(12), "4");
        assert_eq!(qn(0, 1, 2).approx(12), "1.41421356237");
        assert_eq!(QuadNum::from_rational(frac(-1, 3)).approx(5), "-0.33333");
        assert_eq!(QuadNum::from_int(123456789).approx(3), "1.23e8");
        // 99 - 70 sqrt 2 ~ 0.00505: heavy cancellation
        assert_eq!(qn(99, -70, 2).approx(6), "0.00505063");
    }

    #[test]
    fn lower_bounds_are_tight_and_below() {
        for x in [qn(7, -1, 21), qn(0, 1, 2), qn(-3, 5, 7)] {
            for bits in [1, 8, 40] {
                let lo = x.lower_bound(bits);
                let gap = &x - &QuadNum::from_rational(lo);
                assert!(gap.is_positive());
                let eps = QuadNum::from_rational(Rational::new(BigInt::one(), BigInt::one() << bits));
                assert_eq!(gap.try_cmp(&eps), Ok(Ordering::Less));
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let x = qn(7, -1, 21);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"exact":"7 - sqrt(21)","approx":"2.41742430504"}"#);
        assert_eq!(serde_json::from_str::<QuadNum>(&json).unwrap(), x);
    }
}
