//! A finite, fully exact model of the Riemann–Roch machinery on
//! `P^1 x P^1` with `s` vertical and `s` horizontal boundary lines, plus
//! builders for the named intersection-data instances.
//!
//! With boundary lines `x = a_i` and `y = a_j`, the space
//! `V_N = L(N D)` is spanned by `x^alpha y^beta / prod (x-a_i)^N prod (y-a_j)^N`
//! for `0 <= alpha, beta <= N s`. The order along `x = a_k` of an element is
//! the multiplicity of `a_k` as a root of its numerator in `x`, minus `N`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::Rational;
use crate::filtration::{self, Filtration, Subspace};
use crate::surface::{SurfaceError, SurfaceInstance};

#[derive(Debug, Error)]
pub enum DeskError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// `s` marked points on each factor and the multiplier `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeskInstance {
    s: usize,
    n: usize,
    marks: Vec<Rational>,
}

impl DeskInstance {
    /// Marks default to `0, 1, ..., s-1`.
    pub fn new(s: usize, n: usize) -> Result<Self, DeskError> {
        let marks = (0..s).map(|i| Rational::from_integer(BigInt::from(i))).collect();
        Self::with_marks(s, n, marks)
    }

    pub fn with_marks(s: usize, n: usize, marks: Vec<Rational>) -> Result<Self, DeskError> {
        if s < 1 {
            return Err(DeskError::InvalidParameter("s must be positive".into()));
        }
        if n < 1 {
            return Err(DeskError::InvalidParameter("N must be positive".into()));
        }
        if marks.len() != s {
            return Err(DeskError::InvalidParameter(format!("{} marks for s = {s}", marks.len())));
        }
        for i in 0..s {
            if marks[..i].contains(&marks[i]) {
                return Err(DeskError::InvalidParameter(format!("mark {} repeated", marks[i])));
            }
        }
        Ok(DeskInstance { s, n, marks })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marks(&self) -> &[Rational] {
        &self.marks
    }

    /// `N s + 1`: numerator degree bound plus one, in each variable.
    pub fn side(&self) -> usize {
        self.n * self.s + 1
    }

    /// `D^2 = 2 s^2` for `D` the sum of all boundary lines.
    pub fn d_sq(&self) -> i64 {
        2 * (self.s * self.s) as i64
    }

    /// `(D.C) = s` for every boundary line `C`.
    pub fn d_dot_boundary(&self) -> i64 {
        self.s as i64
    }
}

/// A boundary line `x = a_k` (vertical) or `y = a_k` (horizontal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Vertical(usize),
    Horizontal(usize),
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Vertical(k) => write!(f, "x = a{}", k + 1),
            Boundary::Horizontal(k) => write!(f, "y = a{}", k + 1),
        }
    }
}

/// Exponent pairs of the monomial basis of `V_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSpace {
    pub n: usize,
    pub s: usize,
    pub exponents: Vec<(usize, usize)>,
}

/// Order along the line `x = a` (or `y = a`) of a monomial numerator `t^e`
/// in the variable transverse to it, before subtracting the pole `N`.
fn monomial_root_order(e: usize, a: &Rational) -> usize {
    if a.is_zero() {
        e
    } else {
        0
    }
}

impl MonomialSpace {
    /// Enumerates exponent pairs in a box larger than needed and keeps those
    /// whose function has no pole anywhere off the boundary lines.
    pub fn enumerate(inst: &DeskInstance) -> Self {
        let pole_at_infinity = inst.n * inst.s;
        let search = pole_at_infinity + inst.n + 1;
        let exponents = (0..=search)
            .flat_map(|alpha| (0..=search).map(move |beta| (alpha, beta)))
            // at x = infinity the order is N s - alpha
            .filter(|&(alpha, beta)| alpha <= pole_at_infinity && beta <= pole_at_infinity)
            .collect::<Vec<_>>();
        debug_assert!(exponents.iter().all(|&(alpha, beta)| {
            inst.marks.iter().all(|a| {
                monomial_root_order(alpha, a) as i64 - inst.n as i64 >= -(inst.n as i64)
                    && monomial_root_order(beta, a) as i64 - inst.n as i64 >= -(inst.n as i64)
            })
        }));
        MonomialSpace {
            n: inst.n,
            s: inst.s,
            exponents,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

/// `dim V_N`, by counting the monomial basis.
pub fn vn_dimension(s: usize, n: usize) -> Result<usize, DeskError> {
    Ok(MonomialSpace::enumerate(&DeskInstance::new(s, n)?).len())
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Row `t` of the Taylor map at `a` on polynomials of degree `< side`:
/// the coefficient of `(x-a)^t` in `x^alpha` is `C(alpha, t) a^(alpha-t)`.
fn taylor_row(side: usize, t: usize, a: &Rational) -> Vec<Rational> {
    (0..side)
        .map(|alpha| {
            if alpha < t {
                Rational::zero()
            } else {
                Rational::from_integer(binomial(alpha, t)) * pow(a, alpha - t)
            }
        })
        .collect()
}

fn pow(a: &Rational, e: usize) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * a)
}

fn mark(inst: &DeskInstance, boundary: Boundary) -> Result<&Rational, DeskError> {
    let k = match boundary {
        Boundary::Vertical(k) | Boundary::Horizontal(k) => k,
    };
    inst.marks
        .get(k)
        .ok_or_else(|| DeskError::InvalidParameter(format!("no mark a{}", k + 1)))
}

/// Dimension of the univariate numerators of degree `< side` vanishing to
/// order `>= t` at `a`, by rank of the Taylor conditions.
fn vanishing_dim(side: usize, t: usize, a: &Rational) -> usize {
    if t == 0 {
        return side;
    }
    let rows: Vec<Vec<Rational>> = (0..t).map(|k| taylor_row(side, k, a)).collect();
    side - filtration::rank(&rows)
}

/// Quotient dimensions `x_j = dim(W_j / W_{j+1})` of the order filtration
/// `W_j = { f : ord(f) >= j - 1 - N }` along a boundary line, for
/// `j = 1..h` where `W_h` is the last nonzero level.
///
/// Horizontal lines are handled through the `x <-> y` symmetry.
pub fn filtration_dims(inst: &DeskInstance, boundary: Boundary) -> Result<Vec<u64>, DeskError> {
    let a = mark(inst, boundary)?;
    let side = inst.side();
    let level_dim = |j: usize| vanishing_dim(side, j - 1, a) * side;
    let mut dims = Vec::new();
    let mut j = 1;
    while level_dim(j) > 0 {
        dims.push((level_dim(j) - level_dim(j + 1)) as u64);
        j += 1;
    }
    Ok(dims)
}

/// Coefficients of `(x - a)^t x^k` in the monomial basis of degree `< side`.
fn shifted_monomial(side: usize, a: &Rational, t: usize, k: usize) -> Vec<Rational> {
    let mut coeffs = vec![Rational::zero(); side];
    for i in 0..=t {
        let c = Rational::from_integer(binomial(t, i)) * pow(&-a, t - i);
        coeffs[i + k] += c;
    }
    coeffs
}

fn kron_index(side: usize, alpha: usize, beta: usize) -> usize {
    alpha * side + beta
}

/// Level `W_j` (for `j >= 1`) as a subspace of the `(Ns+1)^2`-dimensional
/// coordinate space indexed by `(alpha, beta)`.
fn level_subspace(inst: &DeskInstance, boundary: Boundary, j: usize) -> Result<Subspace<Rational>, DeskError> {
    let a = mark(inst, boundary)?;
    let side = inst.side();
    let t = j - 1;
    let mut vectors = Vec::new();
    if t < side {
        for k in 0..side - t {
            let univariate = shifted_monomial(side, a, t, k);
            for other in 0..side {
                let mut v = vec![Rational::zero(); side * side];
                for (e, c) in univariate.iter().enumerate() {
                    let idx = match boundary {
                        Boundary::Vertical(_) => kron_index(side, e, other),
                        Boundary::Horizontal(_) => kron_index(side, other, e),
                    };
                    v[idx] = c.clone();
                }
                vectors.push(v);
            }
        }
    }
    Subspace::span(side * side, vectors).map_err(|e| DeskError::InvalidParameter(e.to_string()))
}

/// The full order filtration along a boundary line, built from explicit
/// spanning sets `(x-a)^t x^k y^beta`. Intended for small `N s`.
pub fn order_filtration(inst: &DeskInstance, boundary: Boundary) -> Result<Filtration<Rational>, DeskError> {
    let side = inst.side();
    let levels = (2..=side + 1)
        .map(|j| level_subspace(inst, boundary, j))
        .collect::<Result<Vec<_>, _>>()?;
    Filtration::new(side * side, levels).map_err(|e| DeskError::InvalidParameter(e.to_string()))
}

/// Order along `boundary` of the function whose numerator has coordinates
/// `v` in the monomial basis; `None` for the zero function.
pub fn divisor_order(inst: &DeskInstance, boundary: Boundary, v: &[Rational]) -> Option<i64> {
    let a = mark(inst, boundary).ok()?;
    let side = inst.side();
    if v.iter().all(Zero::is_zero) {
        return None;
    }
    let univariate = |other: usize| -> Vec<Rational> {
        (0..side)
            .map(|e| match boundary {
                Boundary::Vertical(_) => v[kron_index(side, e, other)].clone(),
                Boundary::Horizontal(_) => v[kron_index(side, other, e)].clone(),
            })
            .collect()
    };
    let mut order = usize::MAX;
    for other in 0..side {
        let poly = univariate(other);
        if poly.iter().all(Zero::is_zero) {
            continue;
        }
        let t = (0..side)
            .find(|&t| {
                let row = taylor_row(side, t, a);
                let value: Rational = row.iter().zip(&poly).map(|(r, c)| r * c).sum();
                !value.is_zero()
            })
            .expect("nonzero polynomial of degree < side has a nonzero Taylor coefficient");
        order = order.min(t);
    }
    Some(order as i64 - inst.n as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma23Status {
    /// `x_j = U_j`.
    Tight,
    /// `x_j < U_j`.
    Strict,
    /// `W_j = 0`: the space of sections vanishing to this order is trivial.
    Vanishing,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma23Row {
    pub j: usize,
    pub x_j: u64,
    pub u_j: i64,
    pub status: Lemma23Status,
}

/// Checks `x_j <= U_j = 1 + N (D.C) - j C^2` along `x = a_1`, with one
/// extra row past the last nonzero level.
pub fn verify_lemma23(inst: &DeskInstance) -> Result<Vec<Lemma23Row>, DeskError> {
    let x = filtration_dims(inst, Boundary::Vertical(0))?;
    let self_int = 0i64;
    let rows = (1..=x.len() + 1)
        .map(|j| {
            let u_j = 1 + inst.n as i64 * inst.d_dot_boundary() - j as i64 * self_int;
            let x_j = x.get(j - 1).copied().unwrap_or(0);
            let status = if j > x.len() {
                Lemma23Status::Vanishing
            } else if (x_j as i64) == u_j {
                Lemma23Status::Tight
            } else if (x_j as i64) < u_j {
                Lemma23Status::Strict
            } else {
                Lemma23Status::Violated
            };
            Lemma23Row { j, x_j, u_j, status }
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSumCheck {
    pub sum: i128,
    /// `(Ns+1)^2 N (s-2) / 2`
    pub closed_form: i128,
    pub positive: bool,
}

/// `sum_j (j - 1 - N) x_j` along `x = a_1`, with its closed form.
pub fn order_sum_check(inst: &DeskInstance) -> Result<OrderSumCheck, DeskError> {
    let x = filtration_dims(inst, Boundary::Vertical(0))?;
    let sum = filtration::order_sum(&x, inst.n as i64);
    let side = inst.side() as i128;
    let closed_form = side * side * inst.n as i128 * (inst.s as i128 - 2) / 2;
    Ok(OrderSumCheck {
        sum,
        closed_form,
        positive: sum > 0,
    })
}

/// `C x C` for `C` the line minus `s` points: `2s` divisors, intersection
/// `1` between lines of different direction and `0` otherwise.
pub fn build_product_curve_instance(s: usize) -> Result<SurfaceInstance, DeskError> {
    if s < 2 {
        return Err(DeskError::InvalidParameter(format!("s = {s}, need s >= 2")));
    }
    let r = 2 * s;
    let matrix = (0..r)
        .map(|i| (0..r).map(|j| i64::from((i < s) != (j < s))).collect())
        .collect();
    let labels = (1..=s)
        .map(|i| format!("A{i}xC"))
        .chain((1..=s).map(|i| format!("CxA{i}")))
        .collect();
    Ok(SurfaceInstance::asserted(labels, matrix)?)
}

/// `P^1 x P^1` minus the four lines `{0}, {inf}` in each direction.
pub fn build_p1xp1_instance() -> SurfaceInstance {
    let matrix = vec![
        vec![0, 0, 1, 1],
        vec![0, 0, 1, 1],
        vec![1, 1, 0, 0],
        vec![1, 1, 0, 0],
    ];
    let labels = ["{0}xP1", "{inf}xP1", "P1x{0}", "P1x{inf}"]
        .map(String::from)
        .to_vec();
    SurfaceInstance::asserted(labels, matrix).expect("fixed data is valid")
}

/// Images of `A_i x C` in the symmetric square: all pairwise products `1`.
pub fn build_symmetric_square_instance(r: usize) -> Result<SurfaceInstance, DeskError> {
    if r < 2 {
        return Err(DeskError::InvalidParameter(format!("r = {r}, need r >= 2")));
    }
    let labels = (1..=r).map(|i| format!("A{i}+C")).collect();
    Ok(SurfaceInstance::asserted(labels, vec![vec![1; r]; r])?)
}

/// Pull-back of an ample divisor under an isogeny of degree `r`: `r`
/// translates of `E`, every pairwise product equal to `E^2 = 2e`.
pub fn build_abelian_isogeny_instance(r: usize, e: i64) -> Result<SurfaceInstance, DeskError> {
    if r < 4 {
        return Err(DeskError::InvalidParameter(format!("isogeny degree {r} < 4")));
    }
    if e < 1 {
        return Err(DeskError::InvalidParameter(format!("E^2/2 = {e} must be positive")));
    }
    let labels = (1..=r).map(|i| format!("E+s{i}")).collect();
    Ok(SurfaceInstance::asserted(labels, vec![vec![2 * e; r]; r])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{common_adapted_basis, verify_adapted};

    fn desk(s: usize, n: usize) -> DeskInstance {
        DeskInstance::new(s, n).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(vn_dimension(3, 1).unwrap(), 16);
        assert_eq!(vn_dimension(3, 2).unwrap(), 49);
        assert_eq!(vn_dimension(2, 1).unwrap(), 9);
        assert_eq!(vn_dimension(1, 2).unwrap(), 9);
        assert!(vn_dimension(0, 1).is_err());
    }

    #[test]
    fn quotient_dims() {
        assert_eq!(filtration_dims(&desk(3, 1), Boundary::Vertical(0)).unwrap(), vec![4; 4]);
        assert_eq!(filtration_dims(&desk(2, 1), Boundary::Vertical(0)).unwrap(), vec![3; 3]);
        assert_eq!(filtration_dims(&desk(3, 2), Boundary::Vertical(0)).unwrap(), vec![7; 7]);
    }

    #[test]
    fn nonzero_marks_give_the_same_profile() {
        use crate::exactnum::frac;
        let inst = DeskInstance::with_marks(3, 2, vec![frac(5, 3), frac(-2, 1), frac(7, 1)]).unwrap();
        for k in 0..3 {
            assert_eq!(filtration_dims(&inst, Boundary::Vertical(k)).unwrap(), vec![7; 7]);
        }
        assert!(DeskInstance::with_marks(2, 1, vec![frac(1, 2), frac(2, 4)]).is_err());
    }

    #[test]
    fn explicit_filtration_matches_rank_count() {
        let inst = desk(3, 1);
        for b in [Boundary::Vertical(0), Boundary::Vertical(2), Boundary::Horizontal(1)] {
            let f = order_filtration(&inst, b).unwrap();
            let mut steps = f.step_dims();
            while steps.last() == Some(&0) {
                steps.pop();
            }
            let steps: Vec<u64> = steps.into_iter().map(|x| x as u64).collect();
            assert_eq!(steps, filtration_dims(&inst, Boundary::Vertical(0)).unwrap(), "{b}");
        }
    }

    #[test]
    fn orders_of_level_vectors() {
        let inst = desk(2, 1);
        let f = order_filtration(&inst, Boundary::Vertical(1)).unwrap();
        for (idx, level) in f.levels().iter().enumerate() {
            let j = idx as i64 + 1;
            for v in level.basis() {
                assert!(divisor_order(&inst, Boundary::Vertical(1), v).unwrap() >= j - 1 - 1);
            }
        }
        assert_eq!(divisor_order(&inst, Boundary::Vertical(0), &vec![Rational::zero(); 9]), None);
    }

    #[test]
    fn two_boundary_adapted_basis_order_sums() {
        // vertical and horizontal lines through (a1, a1)
        let inst = desk(3, 1);
        let v = Boundary::Vertical(0);
        let h = Boundary::Horizontal(0);
        let fv = order_filtration(&inst, v).unwrap();
        let fh = order_filtration(&inst, h).unwrap();
        let basis = common_adapted_basis(&fv, &fh).unwrap();
        assert!(verify_adapted(&basis.vectors, &fv, &fh));
        let expected = order_sum_check(&inst).unwrap().sum;
        for b in [v, h] {
            let total: i64 = basis
                .vectors
                .iter()
                .map(|psi| divisor_order(&inst, b, psi).unwrap())
                .sum();
            assert_eq!(total as i128, expected);
        }
    }

    #[test]
    fn lemma23_rows() {
        let rows = verify_lemma23(&desk(3, 1)).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[..4].iter().all(|r| r.status == Lemma23Status::Tight && r.x_j == 4));
        assert_eq!(rows[4].status, Lemma23Status::Vanishing);
        let rows = verify_lemma23(&desk(4, 1)).unwrap();
        assert!(rows[..5].iter().all(|r| r.x_j == 5 && r.u_j == 5));
    }

    #[test]
    fn order_sums() {
        let c = order_sum_check(&desk(3, 1)).unwrap();
        assert_eq!((c.sum, c.positive), (8, true));
        let c = order_sum_check(&desk(2, 1)).unwrap();
        assert_eq!((c.sum, c.positive), (0, false));
        let c = order_sum_check(&desk(4, 1)).unwrap();
        assert_eq!((c.sum, c.closed_form), (25, 25));
    }

    #[test]
    fn builders() {
        assert!(build_product_curve_instance(2).unwrap().same_data(&build_p1xp1_instance()));
        assert!(build_product_curve_instance(1).is_err());
        assert_eq!(build_symmetric_square_instance(5).unwrap().matrix()[2][4], 1);
        assert!(build_abelian_isogeny_instance(3, 1).is_err());
        assert!(build_abelian_isogeny_instance(4, 0).is_err());
        assert_eq!(build_abelian_isogeny_instance(4, 1).unwrap().entry(0, 0), 2);
    }
}
