//! Explicit quadratic S-integral points: simultaneous Pell equations, the
//! S-unit family on `X(X+1)Y = 1`, and the two-image test for degree-2 maps.
//!
//! On `X(X+1)Y = 1` a point is built from S-units `r, s` by taking `x` with
//! minimal polynomial `X^2 - T X + r`, `T = s - r - 1`, so that
//! `N(x) = r` and `N(x + 1) = 1 + T + r = s`. Then `y = x'(x'+1) / (r s)`
//! is S-integral. Taking instead `T = r - s + 1` produces `N(x - 1) = s`,
//! which is the same family after `x -> -x`, but it does not lie on this
//! curve as written.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use thiserror::Error;

use crate::exactnum::{exact_sqrt, rat, rational_sqrt, QuadNum, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PellError {
    #[error("{0} is a perfect square")]
    PerfectSquare(BigInt),
    #[error("Pell parameter must be at least 2, got {0}")]
    ParameterTooSmall(BigInt),
    #[error("{value} is not an S-unit for primes {primes:?}")]
    NotAnSUnit { value: Rational, primes: Vec<u64> },
    #[error("cannot parse projective value {0:?}")]
    Parse(String),
}

#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellSolution {
    #[serde_as(as = "DisplayFromStr")]
    pub t: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub v: BigInt,
}

impl PellSolution {
    pub fn satisfies(&self, d: &BigInt) -> bool {
        &self.t * &self.t - d * &self.v * &self.v == BigInt::one()
    }
}

/// Smallest nontrivial solution of `t^2 - D v^2 = 1`, from the continued
/// fraction of `sqrt(D)`.
pub fn fundamental_solution(d: &BigInt) -> Result<PellSolution, PellError> {
    if d < &BigInt::from(2) {
        return Err(PellError::ParameterTooSmall(d.clone()));
    }
    if exact_sqrt(d).is_some() {
        return Err(PellError::PerfectSquare(d.clone()));
    }
    let a0 = d.sqrt();
    let (mut m, mut q, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut h_prev, mut h) = (BigInt::one(), a0.clone());
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    loop {
        let sol = PellSolution {
            t: h.clone(),
            v: k.clone(),
        };
        if sol.satisfies(d) {
            return Ok(sol);
        }
        m = &q * &a - m;
        q = (d - &m * &m) / q;
        a = (&a0 + &m) / &q;
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
}

/// The first `count` non-negative solutions of `t^2 - D v^2 = 1` by
/// increasing `v`, starting with `(1, 0)`.
pub fn pell_solutions(d: &BigInt, count: usize) -> Result<Vec<PellSolution>, PellError> {
    let base = fundamental_solution(d)?;
    let mut out = Vec::with_capacity(count);
    let mut cur = PellSolution {
        t: BigInt::one(),
        v: BigInt::zero(),
    };
    for _ in 0..count {
        let next = PellSolution {
            t: &base.t * &cur.t + d * &base.v * &cur.v,
            v: &base.t * &cur.v + &base.v * &cur.t,
        };
        out.push(std::mem::replace(&mut cur, next));
    }
    Ok(out)
}

/// Element `c0 + c1 * theta` of `Q[theta] / (theta^2 - T theta + n)`.
///
/// This is a field exactly when `T^2 - 4n` is not a rational square; it
/// covers imaginary quadratic points as well as real ones.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgElem {
    #[serde_as(as = "DisplayFromStr")]
    pub c0: Rational,
    #[serde_as(as = "DisplayFromStr")]
    pub c1: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadAlgebra {
    pub trace: Rational,
    pub norm: Rational,
}

impl QuadAlgebra {
    pub fn disc(&self) -> Rational {
        &self.trace * &self.trace - rat(4) * &self.norm
    }

    pub fn is_field(&self) -> bool {
        rational_sqrt(&self.disc()).is_none()
    }

    pub fn constant(&self, c: Rational) -> AlgElem {
        AlgElem {
            c0: c,
            c1: Rational::zero(),
        }
    }

    pub fn theta(&self) -> AlgElem {
        AlgElem {
            c0: Rational::zero(),
            c1: Rational::one(),
        }
    }

    pub fn add(&self, x: &AlgElem, y: &AlgElem) -> AlgElem {
        AlgElem {
            c0: &x.c0 + &y.c0,
            c1: &x.c1 + &y.c1,
        }
    }

    pub fn mul(&self, x: &AlgElem, y: &AlgElem) -> AlgElem {
        let bd = &x.c1 * &y.c1;
        AlgElem {
            c0: &x.c0 * &y.c0 - &bd * &self.norm,
            c1: &x.c0 * &y.c1 + &x.c1 * &y.c0 + &bd * &self.trace,
        }
    }

    /// Image under `theta -> T - theta`.
    pub fn conj(&self, x: &AlgElem) -> AlgElem {
        AlgElem {
            c0: &x.c0 + &x.c1 * &self.trace,
            c1: -&x.c1,
        }
    }

    /// `x x' = c0^2 + c0 c1 T + c1^2 n`.
    pub fn elem_norm(&self, x: &AlgElem) -> Rational {
        &x.c0 * (&x.c0 + &x.c1 * &self.trace) + &x.c1 * &x.c1 * &self.norm
    }

    pub fn elem_trace(&self, x: &AlgElem) -> Rational {
        rat(2) * &x.c0 + &x.c1 * &self.trace
    }

    /// `None` for a zero divisor.
    pub fn inverse(&self, x: &AlgElem) -> Option<AlgElem> {
        let n = self.elem_norm(x);
        if n.is_zero() {
            return None;
        }
        let c = self.conj(x);
        Some(AlgElem {
            c0: c.c0 / &n,
            c1: c.c1 / n,
        })
    }

    /// `theta = (T + sqrt(disc)) / 2` as a real quadratic number, when
    /// the discriminant is positive.
    pub fn real_theta(&self) -> Option<QuadNum> {
        let disc = self.disc();
        if !disc.is_positive() {
            return None;
        }
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let root = QuadNum::sqrt_rational(&disc).ok()?;
        QuadNum::from_rational(&self.trace * &half)
            .checked_add(&root.scale(&half))
            .ok()
    }

    /// Image of `x` under [`Self::real_theta`].
    pub fn embed(&self, x: &AlgElem) -> Option<QuadNum> {
        self.real_theta().and_then(|theta| embed_with(&theta, x))
    }

    /// Square-free part of the discriminant, negative when it is negative.
    pub fn radicand(&self) -> BigInt {
        let disc = self.disc();
        if disc.is_zero() {
            return BigInt::zero();
        }
        let root = QuadNum::sqrt_rational(&disc.abs()).expect("non-negative");
        let m = if root.is_rational() { BigInt::one() } else { root.radicand().clone() };
        if disc.is_negative() {
            -m
        } else {
            m
        }
    }
}

fn embed_with(theta: &QuadNum, x: &AlgElem) -> Option<QuadNum> {
    QuadNum::from_rational(x.c0.clone())
        .checked_add(&theta.scale(&x.c1))
        .ok()
}

fn divides_over(n: &BigInt, primes: &[u64]) -> bool {
    let mut rest = n.abs();
    if rest.is_zero() {
        return false;
    }
    for &p in primes {
        let p = BigInt::from(p);
        while (&rest % &p).is_zero() {
            rest /= &p;
        }
    }
    rest.is_one()
}

/// True when the denominator of `q` is a product of the given primes.
pub fn is_s_integral(q: &Rational, primes: &[u64]) -> bool {
    divides_over(q.denom(), primes)
}

/// True when `q` is nonzero with numerator and denominator products of the
/// given primes.
pub fn is_s_unit(q: &Rational, primes: &[u64]) -> bool {
    !q.is_zero() && divides_over(q.numer(), primes) && divides_over(q.denom(), primes)
}

/// A coordinate of a quadratic point, stored by its characteristic
/// polynomial `X^2 - trace X + norm` over the base field.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadCoordinate {
    pub name: String,
    #[serde_as(as = "DisplayFromStr")]
    pub trace: Rational,
    #[serde_as(as = "DisplayFromStr")]
    pub norm: Rational,
    /// Present for real quadratic coordinates.
    pub value: Option<QuadNum>,
}

#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadIntegralPoint {
    pub curve: String,
    /// Trace and norm of the generating coordinate.
    #[serde_as(as = "DisplayFromStr")]
    pub trace: Rational,
    #[serde_as(as = "DisplayFromStr")]
    pub norm: Rational,
    /// Square-free part of the discriminant `trace^2 - 4 norm`, negative
    /// for imaginary points.
    #[serde_as(as = "DisplayFromStr")]
    pub radicand: BigInt,
    pub coordinates: Vec<QuadCoordinate>,
    pub s_primes: Vec<u64>,
}

impl QuadIntegralPoint {
    pub fn is_real(&self) -> bool {
        self.radicand.is_positive()
    }

    pub fn is_s_integral(&self) -> bool {
        self.coordinates
            .iter()
            .all(|c| is_s_integral(&c.trace, &self.s_primes) && is_s_integral(&c.norm, &self.s_primes))
    }
}

fn rational_coordinate(name: &str, v: &BigInt) -> QuadCoordinate {
    let q = Rational::from_integer(v.clone());
    QuadCoordinate {
        name: name.into(),
        trace: &q + &q,
        norm: &q * &q,
        value: Some(QuadNum::from_rational(q)),
    }
}

/// A point `(t, u, v)` on `t^2 - 2v^2 = 1, u^2 - 3v^2 = 1`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPellPoint {
    #[serde_as(as = "DisplayFromStr")]
    pub t: BigInt,
    pub u: QuadNum,
    #[serde_as(as = "DisplayFromStr")]
    pub v: BigInt,
    pub point: QuadIntegralPoint,
}

impl TwoPellPoint {
    /// Residuals of both equations, computed in `Q(u)`.
    pub fn residuals(&self) -> (QuadNum, QuadNum) {
        two_pell_residuals(&self.t, &self.u, &self.v)
    }

    pub fn conjugate(&self) -> Self {
        TwoPellPoint {
            u: -self.u.clone(),
            ..self.clone()
        }
    }
}

pub fn two_pell_residuals(t: &BigInt, u: &QuadNum, v: &BigInt) -> (QuadNum, QuadNum) {
    let t = Rational::from_integer(t.clone());
    let v2 = Rational::from_integer(v * v);
    let first = QuadNum::from_rational(&t * &t - rat(2) * &v2 - rat(1));
    let u2 = u.checked_mul(u).expect("u squared stays in its own field");
    let second = u2
        .checked_sub(&QuadNum::from_rational(rat(3) * v2 + rat(1)))
        .expect("rational subtrahend");
    (first, second)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPellBatch {
    pub points: Vec<TwoPellPoint>,
    /// Solutions of the first equation with `3v^2 + 1` a perfect square.
    pub skipped_rational: usize,
}

pub const TWO_PELL_CURVE: &str = "t^2 - 2v^2 = 1, u^2 - 3v^2 = 1";

/// The first `count` genuinely quadratic points obtained from solutions of
/// `t^2 - 2v^2 = 1` by setting `u = sqrt(3v^2 + 1)`.
pub fn two_pell_points(count: usize) -> TwoPellBatch {
    let d = BigInt::from(2);
    let base = fundamental_solution(&d).expect("2 is not a square");
    let mut cur = PellSolution {
        t: BigInt::one(),
        v: BigInt::zero(),
    };
    let mut points = Vec::with_capacity(count);
    let mut skipped_rational = 0;
    while points.len() < count {
        let m = BigInt::from(3) * &cur.v * &cur.v + 1;
        if exact_sqrt(&m).is_some() {
            skipped_rational += 1;
        } else {
            let u = QuadNum::sqrt(m.clone()).expect("positive radicand");
            let point = QuadIntegralPoint {
                curve: TWO_PELL_CURVE.into(),
                trace: Rational::zero(),
                norm: -Rational::from_integer(m.clone()),
                radicand: u.radicand().clone(),
                coordinates: vec![
                    rational_coordinate("t", &cur.t),
                    QuadCoordinate {
                        name: "u".into(),
                        trace: Rational::zero(),
                        norm: -Rational::from_integer(m),
                        value: Some(u.clone()),
                    },
                    rational_coordinate("v", &cur.v),
                ],
                s_primes: Vec::new(),
            };
            points.push(TwoPellPoint {
                t: cur.t.clone(),
                u,
                v: cur.v.clone(),
                point,
            });
        }
        cur = PellSolution {
            t: &base.t * &cur.t + &d * &base.v * &cur.v,
            v: &base.t * &cur.v + &base.v * &cur.t,
        };
    }
    TwoPellBatch {
        points,
        skipped_rational,
    }
}

pub const EX13_CURVE: &str = "X(X+1)Y = 1";

/// A point on `X(X+1)Y = 1` from a pair of S-units.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ex13Point {
    #[serde_as(as = "DisplayFromStr")]
    pub r: Rational,
    #[serde_as(as = "DisplayFromStr")]
    pub s: Rational,
    pub point: QuadIntegralPoint,
    /// `y = 1 / (x (x+1))` on the basis `1, x`.
    pub y: AlgElem,
}

impl Ex13Point {
    pub fn algebra(&self) -> QuadAlgebra {
        QuadAlgebra {
            trace: self.point.trace.clone(),
            norm: self.point.norm.clone(),
        }
    }

    /// `x (x+1) y - 1`, which must vanish.
    pub fn residual(&self) -> AlgElem {
        ex13_residual(&self.algebra(), &self.y)
    }
}

fn ex13_residual(alg: &QuadAlgebra, y: &AlgElem) -> AlgElem {
    let x = alg.theta();
    let x1 = alg.add(&x, &alg.constant(rat(1)));
    let prod = alg.mul(&alg.mul(&x, &x1), y);
    alg.add(&prod, &alg.constant(rat(-1)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ex13Outcome {
    Point(Ex13Point),
    /// `T^2 - 4r` is a rational square, so `x` is rational.
    Skipped {
        #[serde(with = "display_rational")]
        r: Rational,
        #[serde(with = "display_rational")]
        s: Rational,
    },
}

mod display_rational {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(q: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(q)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(de)?;
        Rational::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Builds the point with `N(x) = r`, `N(x+1) = s`.
pub fn ex13_point(r: &Rational, s: &Rational, primes: &[u64]) -> Result<Ex13Outcome, PellError> {
    for q in [r, s] {
        if !is_s_unit(q, primes) {
            return Err(PellError::NotAnSUnit {
                value: q.clone(),
                primes: primes.to_vec(),
            });
        }
    }
    let alg = QuadAlgebra {
        trace: s - r - rat(1),
        norm: r.clone(),
    };
    let disc = alg.disc();
    // one factorization decides squareness and gives the radicand
    let root = QuadNum::sqrt_rational(&disc.abs()).expect("non-negative");
    if root.is_rational() && !disc.is_negative() {
        return Ok(Ex13Outcome::Skipped {
            r: r.clone(),
            s: s.clone(),
        });
    }
    // x (x+1) = -r + (T+1) x has norm r s, so y is its conjugate over r s
    let t1 = &alg.trace + rat(1);
    let rs = r * s;
    let y = AlgElem {
        c0: (&t1 * &alg.trace - r) / &rs,
        c1: -&t1 / &rs,
    };
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let theta = disc
        .is_positive()
        .then(|| QuadNum::from_rational(&alg.trace * &half) + root.scale(&half));
    let radicand = if root.is_rational() {
        BigInt::from(-1)
    } else if disc.is_negative() {
        -root.radicand()
    } else {
        root.radicand().clone()
    };
    let point = QuadIntegralPoint {
        curve: EX13_CURVE.into(),
        trace: alg.trace.clone(),
        norm: alg.norm.clone(),
        radicand,
        coordinates: vec![
            QuadCoordinate {
                name: "x".into(),
                trace: alg.trace.clone(),
                norm: r.clone(),
                value: theta.clone(),
            },
            QuadCoordinate {
                name: "y".into(),
                trace: (rat(2) * &y.c0) + (&y.c1 * &alg.trace),
                norm: rs.recip(),
                value: theta.as_ref().and_then(|t| embed_with(t, &y)),
            },
        ],
        s_primes: primes.to_vec(),
    };
    Ok(Ex13Outcome::Point(Ex13Point {
        r: r.clone(),
        s: s.clone(),
        point,
        y,
    }))
}

/// All `±2^a 3^b` with `|a|, |b| <= max_exp`, ordered by height then sign.
pub fn s_units_23(max_exp: u32) -> Vec<Rational> {
    let e = max_exp as i32;
    let mut out = Vec::new();
    for a in -e..=e {
        for b in -e..=e {
            let q = pow23(a, b);
            out.push(q.clone());
            out.push(-q);
        }
    }
    out.sort_by(|x, y| height(x).cmp(&height(y)).then(y.cmp(x)));
    out
}

fn pow23(a: i32, b: i32) -> Rational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (p, e) in [(2u32, a), (3u32, b)] {
        let f = BigInt::from(p).pow(e.unsigned_abs());
        if e >= 0 {
            num *= f;
        } else {
            den *= f;
        }
    }
    Rational::new(num, den)
}

fn height(q: &Rational) -> BigInt {
    q.numer().abs().max(q.denom().clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ex13Box {
    pub max_exp: u32,
    pub points: Vec<Ex13Point>,
    pub skipped: usize,
}

/// Every pair of S-units over `{2, 3}` in the exponent box.
pub fn ex13_box(max_exp: u32) -> Ex13Box {
    let units = s_units_23(max_exp);
    let mut points = Vec::new();
    let mut skipped = 0;
    for r in &units {
        for s in &units {
            match ex13_point(r, s, &[2, 3]).expect("box elements are S-units") {
                Ex13Outcome::Point(p) => points.push(p),
                Ex13Outcome::Skipped { .. } => skipped += 1,
            }
        }
    }
    Ex13Box {
        max_exp,
        points,
        skipped,
    }
}

/// A point of the projective line over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProjValue {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for ProjValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjValue::Finite(q) => write!(f, "{q}"),
            ProjValue::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ProjValue {
    type Err = PellError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "inf" | "infinity" | "∞" => Ok(ProjValue::Infinity),
            _ => Rational::from_str(t)
                .map(ProjValue::Finite)
                .map_err(|_| PellError::Parse(s.to_string())),
        }
    }
}

impl Serialize for ProjValue {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProjValue {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddendumVerdict {
    pub images: Vec<ProjValue>,
    pub distinct_count: usize,
    /// 1-based indices mapping to the first image, then the rest; only when
    /// there are two distinct images.
    pub pairing: Option<(Vec<usize>, Vec<usize>)>,
    /// Zero-sum signs, present for a 2|2 pairing.
    pub epsilon: Option<Vec<i8>>,
    /// A 3|1 split, which no degree-2 map can produce.
    pub unbalanced: bool,
}

pub fn addendum_check(images: [ProjValue; 4]) -> AddendumVerdict {
    let mut distinct: Vec<&ProjValue> = Vec::new();
    for v in &images {
        if !distinct.contains(&v) {
            distinct.push(v);
        }
    }
    let distinct_count = distinct.len();
    let (mut pairing, mut epsilon, mut unbalanced) = (None, None, false);
    if distinct_count == 2 {
        let (first, rest): (Vec<usize>, Vec<usize>) = (1..=4).partition(|&i| images[i - 1] == images[0]);
        if first.len() == 2 {
            epsilon = Some(
                images
                    .iter()
                    .map(|v| if *v == images[0] { 1 } else { -1 })
                    .collect(),
            );
        } else {
            unbalanced = true;
        }
        pairing = Some((first, rest));
    }
    AddendumVerdict {
        images: images.to_vec(),
        distinct_count,
        pairing,
        epsilon,
        unbalanced,
    }
}
