//! The degeneracy criterion for integral points.
//!
//! For each boundary divisor `D_i`, `xi_i` is the smallest positive root of
//! `D_i^2 x^2 - 2 (D.D_i) x + D^2`, and the criterion asks for the strict
//! inequality `2 D^2 xi_i > (D.D_i) xi_i^2 + 3 D^2 p_i`. The constant-product
//! special case (`p_i p_j (D_i.D_j) = c` for all pairs, `r >= 4`) is checked
//! on its own, and [`lambda_window`] produces a rational witness `lambda` for
//! the cubic positivity that drives the order-sum estimate.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use thiserror::Error;

use crate::exactnum::{self, floor_int, rat, QuadNum, Rational};
use crate::surface::{derive, hodge_check, DerivedIntersections, HodgeReport, SurfaceInstance};

/// Largest dyadic exponent tried by [`lambda_window`].
pub const MAX_WINDOW_STEPS: u32 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CriterionError {
    #[error("inconsistent intersection data at divisor {index}: {reason}")]
    InconsistentData { index: usize, reason: String },
    #[error("no lambda window for divisor {index}: the criterion inequality does not hold strictly")]
    NoWindowFound { index: usize },
}

fn int(x: &BigInt) -> Rational {
    Rational::from_integer(x.clone())
}

/// `xi_i`: the minimal positive root of `D_i^2 x^2 - 2 (D.D_i) x + D^2`.
pub fn xi(
    instance: &SurfaceInstance,
    derived: &DerivedIntersections,
    i: usize,
) -> Result<QuadNum, CriterionError> {
    let inconsistent = |reason: String| CriterionError::InconsistentData { index: i, reason };
    let dd = &derived.d_dot[i];
    let self_int = &derived.self_int[i];
    if !derived.d_sq.is_positive() {
        return Err(inconsistent(format!("D^2 = {} is not positive", derived.d_sq)));
    }
    if !dd.is_positive() {
        return Err(inconsistent(format!(
            "(D.{}) = {dd} is not positive",
            instance.labels()[i]
        )));
    }
    let lhs = &derived.d_sq * self_int;
    if lhs > dd * dd {
        return Err(inconsistent(format!(
            "Hodge index violated: D^2 * D_i^2 = {lhs} > (D.D_i)^2 = {}",
            dd * dd
        )));
    }
    let roots = exactnum::quad_roots(&int(self_int), &(int(dd) * rat(-2)), &int(&derived.d_sq));
    exactnum::min_positive_root(&roots).map_err(|e| inconsistent(e.to_string()))
}

/// Per-divisor outcome of the criterion inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorCriterion {
    pub index: usize,
    pub label: String,
    pub xi: QuadNum,
    /// `2 D^2 xi - (D.D_i) xi^2 - 3 D^2 p_i`
    pub margin: QuadNum,
    pub holds: bool,
}

pub fn condition_ii(
    instance: &SurfaceInstance,
    derived: &DerivedIntersections,
    i: usize,
) -> Result<DivisorCriterion, CriterionError> {
    let xi = xi(instance, derived, i)?;
    let d_sq = int(&derived.d_sq);
    let dd = int(&derived.d_dot[i]);
    let p = rat(instance.p()[i]);
    let margin = &(&xi.scale(&(&d_sq * rat(2))) - &(&xi * &xi).scale(&dd)) - &(d_sq * rat(3) * p);
    let holds = margin.is_positive();
    Ok(DivisorCriterion {
        index: i,
        label: instance.labels()[i].clone(),
        xi,
        margin,
        holds,
    })
}

/// Constant-product hypothesis `p_i p_j (D_i.D_j) = c > 0`, with `r >= 4`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub applicable: bool,
    #[serde_as(as = "Option<DisplayFromStr>")]
    pub c: Option<BigInt>,
    /// Common value of `p_i^2 (D_i.D_i)` when all diagonal products agree.
    #[serde_as(as = "Option<DisplayFromStr>")]
    pub diagonal_value: Option<BigInt>,
    /// Common value of `p_i p_j (D_i.D_j)`, `i != j`, when they all agree.
    #[serde_as(as = "Option<DisplayFromStr>")]
    pub off_diagonal_value: Option<BigInt>,
    pub r_at_least_4: bool,
    /// Smallest positive integer multiplicities making all products equal,
    /// when the matrix admits any.
    #[serde_as(as = "Option<Vec<DisplayFromStr>>")]
    pub inferred_p: Option<Vec<BigInt>>,
    #[serde_as(as = "Option<DisplayFromStr>")]
    pub inferred_c: Option<BigInt>,
    pub reasons: Vec<String>,
}

fn common_value(values: impl Iterator<Item = BigInt>) -> Option<BigInt> {
    let set: BTreeSet<BigInt> = values.collect();
    (set.len() == 1).then(|| set.into_iter().next().unwrap())
}

/// Positive rationals `q` with `q_i q_j M_ij` constant, scaled to coprime
/// integers. Requires every entry to be positive.
fn infer_multiplicities(instance: &SurfaceInstance) -> Option<(Vec<BigInt>, BigInt)> {
    let r = instance.r();
    if instance.matrix().iter().flatten().any(|&m| m <= 0) {
        return None;
    }
    // row 0 fixes the ratios: q_j / q_k = M_0k / M_0j
    let q: Vec<Rational> = (0..r)
        .map(|j| Rational::new(BigInt::one(), BigInt::from(instance.entry(0, j))))
        .collect();
    let lcm = q
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = q.iter().map(|x| (x * int(&lcm)).to_integer()).collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let p: Vec<BigInt> = scaled.into_iter().map(|x| x / &gcd).collect();
    let c = common_value(
        (0..r).flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| &p[i] * &p[j] * instance.entry(i, j)),
    )?;
    Some((p, c))
}

pub fn check_theorem1(instance: &SurfaceInstance) -> Theorem1Report {
    let r = instance.r();
    let product = |i: usize, j: usize| {
        BigInt::from(instance.p()[i]) * instance.p()[j] * instance.entry(i, j)
    };
    let diagonal_value = common_value((0..r).map(|i| product(i, i)));
    let off_diagonal_value = common_value(
        (0..r)
            .flat_map(|i| (0..r).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| product(i, j)),
    );
    let mut reasons = Vec::new();
    let r_at_least_4 = r >= 4;
    if !r_at_least_4 {
        reasons.push(format!("only {r} divisors, need at least 4"));
    }
    let c = match (&diagonal_value, &off_diagonal_value) {
        (Some(d), Some(o)) if d == o && d.is_positive() => Some(d.clone()),
        (Some(d), Some(o)) if d == o => {
            reasons.push(format!("common product {d} is not positive"));
            None
        }
        (Some(d), Some(o)) => {
            reasons.push(format!("diagonal products equal {d} but off-diagonal products equal {o}"));
            None
        }
        (None, _) => {
            reasons.push("diagonal products p_i^2 (D_i.D_i) are not all equal".into());
            None
        }
        (_, None) => {
            reasons.push("off-diagonal products p_i p_j (D_i.D_j) are not all equal".into());
            None
        }
    };
    let (inferred_p, inferred_c) = match infer_multiplicities(instance) {
        Some((p, c)) => (Some(p), Some(c)),
        None => (None, None),
    };
    Theorem1Report {
        applicable: c.is_some() && r_at_least_4,
        c,
        diagonal_value,
        off_diagonal_value,
        r_at_least_4,
        inferred_p,
        inferred_c,
        reasons,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionEcho {
    pub no_triple_points: bool,
    pub ample: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub r: usize,
    pub labels: Vec<String>,
    pub p: Vec<i64>,
    pub derived: DerivedIntersections,
    pub hodge: HodgeReport,
    pub divisors: Vec<DivisorCriterion>,
    pub theorem1: Theorem1Report,
    pub main_theorem_holds: bool,
    pub assumptions: AssumptionEcho,
    pub warnings: Vec<String>,
}

/// Runs the full criterion. Fails only on data no ample divisor can produce.
pub fn check_main_theorem(instance: &SurfaceInstance) -> Result<CriterionReport, CriterionError> {
    let derived = derive(instance);
    let hodge = hodge_check(instance, &derived);
    if let Some(v) = hodge.first_violation() {
        return Err(CriterionError::InconsistentData {
            index: v.index,
            reason: format!("Hodge index violated: D^2 * D_i^2 = {} > (D.D_i)^2 = {}", v.lhs, v.rhs),
        });
    }
    let divisors = (0..instance.r())
        .map(|i| condition_ii(instance, &derived, i))
        .collect::<Result<Vec<_>, _>>()?;
    let assumptions = AssumptionEcho {
        no_triple_points: instance.assert_no_triple_points(),
        ample: instance.assert_ample(),
    };
    let mut warnings = instance.warnings().to_vec();
    if !assumptions.no_triple_points {
        warnings.push("no-triple-points hypothesis not asserted; no verdict can be issued".into());
    }
    if !assumptions.ample {
        warnings.push("ampleness of D not asserted; no verdict can be issued".into());
    }
    let main_theorem_holds = instance.r() >= 2
        && assumptions.no_triple_points
        && assumptions.ample
        && divisors.iter().all(|d| d.holds);
    Ok(CriterionReport {
        r: instance.r(),
        labels: instance.labels().to_vec(),
        p: instance.p().to_vec(),
        derived,
        hodge,
        divisors,
        theorem1: check_theorem1(instance),
        main_theorem_holds,
        assumptions,
        warnings,
    })
}

/// Value of `lambda^2 (D.D_i)/2 - lambda^3 D_i^2/3 - D^2 p_i/2`.
pub fn window_cubic(derived: &DerivedIntersections, p: i64, i: usize, lambda: &Rational) -> Rational {
    let l2 = lambda * lambda;
    let l3 = &l2 * lambda;
    l2 * int(&derived.d_dot[i]) / rat(2) - l3 * int(&derived.self_int[i]) / rat(3)
        - int(&derived.d_sq) * rat(p) / rat(2)
}

/// Value of `(D.D_i) lambda - D_i^2 lambda^2 / 2`, to be compared with `D^2/2`.
pub fn window_quadratic(derived: &DerivedIntersections, i: usize, lambda: &Rational) -> Rational {
    int(&derived.d_dot[i]) * lambda - int(&derived.self_int[i]) * lambda * lambda / rat(2)
}

/// A certified rational `lambda` in `(0, xi_i)` for one divisor.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaWindow {
    pub index: usize,
    #[serde_as(as = "DisplayFromStr")]
    pub lambda: Rational,
    /// Dyadic step: `lambda = base * (1 - 2^-k)`.
    pub k: u32,
    #[serde_as(as = "DisplayFromStr")]
    pub cubic_value: Rational,
    #[serde_as(as = "DisplayFromStr")]
    pub quadratic_value: Rational,
    pub ineq36_ok: bool,
}

/// Smallest `k >= 1` for which `lambda = base * (1 - 2^-k)` makes the cubic
/// strictly positive, where `base` is `xi_i` itself when rational and a
/// rational lower bound within `2^-(k+4)` of it otherwise.
pub fn lambda_window(
    instance: &SurfaceInstance,
    derived: &DerivedIntersections,
    i: usize,
) -> Result<LambdaWindow, CriterionError> {
    let crit = condition_ii(instance, derived, i)?;
    if !crit.holds {
        return Err(CriterionError::NoWindowFound { index: i });
    }
    let xi = &crit.xi;
    let half_d_sq = int(&derived.d_sq) / rat(2);
    for k in 1..=MAX_WINDOW_STEPS {
        let base = xi.lower_bound(k + 4);
        let step = Rational::new(BigInt::one(), BigInt::one() << k);
        let lambda = base * (Rational::one() - step);
        if !lambda.is_positive() {
            continue;
        }
        let cubic_value = window_cubic(derived, instance.p()[i], i, &lambda);
        if !cubic_value.is_positive() {
            continue;
        }
        debug_assert_eq!(
            QuadNum::from_rational(lambda.clone()).try_cmp(xi),
            Ok(Ordering::Less)
        );
        let quadratic_value = window_quadratic(derived, i, &lambda);
        let ineq36_ok = quadratic_value < half_d_sq;
        return Ok(LambdaWindow {
            index: i,
            lambda,
            k,
            cubic_value,
            quadratic_value,
            ineq36_ok,
        });
    }
    Err(CriterionError::NoWindowFound { index: i })
}

/// `R = floor(lambda N)` and `sum_{j=1}^R U_j` with `U_j = 1 + N (D.D_i) - j D_i^2`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumU {
    #[serde_as(as = "DisplayFromStr")]
    pub r_floor: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub total: BigInt,
    /// `U_R > 0` (vacuous when `R = 0`).
    pub all_positive: bool,
}

pub fn sum_u(derived: &DerivedIntersections, i: usize, n: u64, lambda: &Rational) -> SumU {
    let r_floor = floor_int(&(lambda * Rational::from_integer(BigInt::from(n))));
    let head = BigInt::one() + BigInt::from(n) * &derived.d_dot[i];
    let self_int = &derived.self_int[i];
    let total = &r_floor * &head - self_int * &r_floor * (&r_floor + 1u32) / 2u32;
    let all_positive = r_floor.is_zero() || (&head - &r_floor * self_int).is_positive();
    SumU {
        r_floor,
        total,
        all_positive,
    }
}
