//! Exact linear algebra for descending filtrations of a finite-dimensional
//! space, a basis adapted to two filtrations at once, and the combinatorial
//! lower bound on weighted level sums.
//!
//! Everything here is generic over an [`ExactField`]; the crate root exposes
//! the rational instantiations.

use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use thiserror::Error;

use crate::exactnum::Rational;
use crate::scalar::{ExactField, OrderedScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    #[error("vector of length {got} in a space of dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed filtration at level {level}: {reason}")]
    MalformedFiltration { level: usize, reason: String },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("infeasible: capacities sum to {available} but {required} is required")]
    Infeasible { available: String, required: String },
    #[error("cannot parse filtration document: {0}")]
    Parse(String),
}

/// Reduced row-echelon form of `rows`, zero rows dropped, pivots scaled to one.
fn rref<T: ExactField>(mut rows: Vec<Vec<T>>, ncols: usize) -> Vec<Vec<T>> {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = T::one() / rows[rank][col].clone();
        for x in rows[rank].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - factor.clone() * p.clone();
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// Rank of a list of vectors.
pub fn rank<T: ExactField>(vectors: &[Vec<T>]) -> usize {
    let ncols = vectors.first().map_or(0, Vec::len);
    rref(vectors.to_vec(), ncols).len()
}

/// A subspace of `T^n`, stored by its canonical reduced echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace<T> {
    ambient_dim: usize,
    basis: Vec<Vec<T>>,
}

impl<T: ExactField> Subspace<T> {
    pub fn span<I>(ambient_dim: usize, vectors: I) -> Result<Self, FiltrationError>
    where
        I: IntoIterator<Item = Vec<T>>,
    {
        let rows: Vec<Vec<T>> = vectors.into_iter().collect();
        if let Some(v) = rows.iter().find(|v| v.len() != ambient_dim) {
            return Err(FiltrationError::DimensionMismatch {
                expected: ambient_dim,
                got: v.len(),
            });
        }
        Ok(Subspace {
            ambient_dim,
            basis: rref(rows, ambient_dim),
        })
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect();
        Subspace { ambient_dim, basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn contains(&self, v: &[T]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let mut w = v.to_vec();
        for row in &self.basis {
            let col = row.iter().position(|x| !x.is_zero()).expect("echelon rows are nonzero");
            if w[col].is_zero() {
                continue;
            }
            let f = w[col].clone();
            for (x, r) in w.iter_mut().zip(row) {
                *x = x.clone() - f.clone() * r.clone();
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let rows = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: rref(rows, self.ambient_dim),
        }
    }

    /// Intersection by the Zassenhaus sum-intersection method.
    pub fn intersect(&self, other: &Self) -> Self {
        let n = self.ambient_dim;
        let rows = self
            .basis
            .iter()
            .map(|u| u.iter().chain(u).cloned().collect())
            .chain(other.basis.iter().map(|w| {
                w.iter().cloned().chain(std::iter::repeat_n(T::zero(), n)).collect()
            }))
            .collect();
        let reduced = rref(rows, 2 * n);
        let inter = reduced
            .into_iter()
            .filter(|row| row[..n].iter().all(|x| x.is_zero()))
            .map(|row| row[n..].to_vec())
            .collect();
        Subspace {
            ambient_dim: n,
            basis: rref(inter, n),
        }
    }
}

fn unit<T: ExactField>(n: usize, i: usize) -> Vec<T> {
    (0..n).map(|k| if k == i { T::one() } else { T::zero() }).collect()
}

/// A weakly descending chain `V = W_1 ⊇ W_2 ⊇ ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration<T> {
    ambient_dim: usize,
    levels: Vec<Subspace<T>>,
}

impl<T: ExactField> Filtration<T> {
    /// Builds a filtration from its levels. The ambient space is prepended
    /// when the first level is not already the whole space.
    pub fn new(ambient_dim: usize, levels: Vec<Subspace<T>>) -> Result<Self, FiltrationError> {
        let mut chain = Vec::with_capacity(levels.len() + 1);
        if levels.first().is_none_or(|l| !l.is_full()) {
            chain.push(Subspace::full(ambient_dim));
        }
        chain.extend(levels);
        for (t, level) in chain.iter().enumerate() {
            if level.ambient_dim() != ambient_dim {
                return Err(FiltrationError::MalformedFiltration {
                    level: t,
                    reason: format!("ambient dimension {} != {ambient_dim}", level.ambient_dim()),
                });
            }
            if t > 0 && !chain[t - 1].contains_subspace(level) {
                return Err(FiltrationError::MalformedFiltration {
                    level: t,
                    reason: "level is not contained in its predecessor".into(),
                });
            }
        }
        Ok(Filtration {
            ambient_dim,
            levels: chain,
        })
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Filtration {
            ambient_dim,
            levels: vec![Subspace::full(ambient_dim)],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn levels(&self) -> &[Subspace<T>] {
        &self.levels
    }

    /// Quotient dimensions `dim(W_j / W_{j+1})`, the last level counted
    /// against zero.
    pub fn step_dims(&self) -> Vec<usize> {
        let dims: Vec<usize> = self.levels.iter().map(Subspace::dim).collect();
        dims.iter()
            .zip(dims.iter().skip(1).chain(std::iter::once(&0)))
            .map(|(a, b)| a - b)
            .collect()
    }
}

/// A basis of the ambient space together with, for each level of each input
/// filtration, how many basis vectors lie in that level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedBasis<T> {
    pub vectors: Vec<Vec<T>>,
    pub counts_a: Vec<usize>,
    pub counts_b: Vec<usize>,
}

fn level_counts<T: ExactField>(vectors: &[Vec<T>], f: &Filtration<T>) -> Vec<usize> {
    f.levels()
        .iter()
        .map(|w| vectors.iter().filter(|v| w.contains(v)).count())
        .collect()
}

/// Extends `inner` (a proper subspace of `space`) by canonical basis vectors
/// of `space` up to a hyperplane of `space`.
fn hyperplane_containing<T: ExactField>(space: &Subspace<T>, inner: &Subspace<T>) -> Subspace<T> {
    let target = space.dim() - 1;
    let mut h = inner.clone();
    for v in space.basis() {
        if h.dim() == target {
            break;
        }
        if !h.contains(v) {
            h = h.sum(&Subspace {
                ambient_dim: space.ambient_dim(),
                basis: vec![v.clone()],
            });
        }
    }
    h
}

fn adapted_in<T: ExactField>(
    space: &Subspace<T>,
    f_levels: &[Subspace<T>],
    g_levels: &[Subspace<T>],
) -> Vec<Vec<T>> {
    let d = space.dim();
    match d {
        0 => return Vec::new(),
        1 => return vec![space.basis()[0].clone()],
        _ => {}
    }
    // Refine the first chain so its second level is a hyperplane H.
    let proper: Vec<Subspace<T>> = f_levels.iter().filter(|l| l.dim() < d).cloned().collect();
    let below = proper.first().cloned().unwrap_or_else(|| Subspace::zero(space.ambient_dim()));
    let hyper = hyperplane_containing(space, &below);

    let g_cut: Vec<Subspace<T>> = g_levels.iter().map(|g| g.intersect(&hyper)).collect();
    let mut basis = adapted_in(&hyper, &proper, &g_cut);

    // The levels of the second chain not inside H form a prefix; the last
    // of them is the smallest. Take a vector from it outside H.
    let source = g_levels
        .iter()
        .take_while(|g| !hyper.contains_subspace(g))
        .last()
        .unwrap_or(space);
    let extra = source
        .basis()
        .iter()
        .find(|v| !hyper.contains(v))
        .expect("a level not inside H has a basis vector outside H")
        .clone();
    basis.push(extra);
    basis
}

/// Basis of the ambient space containing a basis of every level of `f` and
/// of every level of `g`.
///
/// Built by induction on the dimension: refine `f` so that its second level
/// `H` is a hyperplane, solve the problem inside `H` for the chains cut down
/// to `H`, then add one vector taken from the smallest level of `g` that is
/// not contained in `H`.
pub fn common_adapted_basis<T: ExactField>(
    f: &Filtration<T>,
    g: &Filtration<T>,
) -> Result<AdaptedBasis<T>, FiltrationError> {
    if f.ambient_dim() != g.ambient_dim() {
        return Err(FiltrationError::MalformedFiltration {
            level: 0,
            reason: format!(
                "ambient dimensions differ: {} vs {}",
                f.ambient_dim(),
                g.ambient_dim()
            ),
        });
    }
    let space = Subspace::full(f.ambient_dim());
    let vectors = adapted_in(&space, f.levels(), g.levels());
    Ok(AdaptedBasis {
        counts_a: level_counts(&vectors, f),
        counts_b: level_counts(&vectors, g),
        vectors,
    })
}

/// Independent check: the vectors form a basis, and for every level `W` of
/// `f` and `g` exactly `dim W` of them lie in `W` and span it.
pub fn verify_adapted<T: ExactField>(vectors: &[Vec<T>], f: &Filtration<T>, g: &Filtration<T>) -> bool {
    let d = f.ambient_dim();
    if g.ambient_dim() != d || vectors.len() != d || vectors.iter().any(|v| v.len() != d) {
        return false;
    }
    if d > 0 && rank(vectors) != d {
        return false;
    }
    f.levels().iter().chain(g.levels()).all(|w| {
        let members: Vec<Vec<T>> = vectors.iter().filter(|v| w.contains(v)).cloned().collect();
        members.len() == w.dim() && (members.is_empty() || rank(&members) == w.dim())
    })
}

/// `sum_{j=1}^R j U_j`, the lower bound guaranteed when `sum_{j<=R} U_j <= d`.
pub fn lemma31_bound(u: &[u64], d: u64, r: usize) -> Result<u128, FiltrationError> {
    if r > u.len() {
        return Err(FiltrationError::PreconditionViolated(format!(
            "R = {r} exceeds h = {}",
            u.len()
        )));
    }
    let head: u128 = u[..r].iter().map(|&x| u128::from(x)).sum();
    if head > u128::from(d) {
        return Err(FiltrationError::PreconditionViolated(format!(
            "sum of the first {r} capacities is {head} > d = {d}"
        )));
    }
    Ok(u[..r]
        .iter()
        .enumerate()
        .map(|(j, &x)| (j as u128 + 1) * u128::from(x))
        .sum())
}

/// Minimum of `sum_j j x_j` over real `0 <= x_j <= U_j` with `sum_j x_j = d`.
///
/// The minimum fills the lowest indices first; a fractional remainder, if
/// any, lands on the boundary index.
pub fn min_weighted_fill<T: OrderedScalar>(u: &[T], d: &T) -> Result<T, FiltrationError> {
    let zero = T::zero();
    if *d < zero || u.iter().any(|x| *x < zero) {
        return Err(FiltrationError::PreconditionViolated(
            "capacities and budget must be non-negative".into(),
        ));
    }
    let mut remaining = d.clone();
    let mut total = T::zero();
    for (j, cap) in u.iter().enumerate() {
        if remaining <= zero {
            break;
        }
        let take = if *cap < remaining { cap.clone() } else { remaining.clone() };
        let weight = T::from_usize(j + 1).expect("index fits the scalar type");
        total = total + weight * take.clone();
        remaining = remaining - take;
    }
    if remaining > zero {
        let available = u.iter().cloned().fold(T::zero(), |a, b| a + b);
        return Err(FiltrationError::Infeasible {
            available: format!("{available:?}"),
            required: format!("{d:?}"),
        });
    }
    Ok(total)
}

/// [`min_weighted_fill`] on integer capacities, returned as an exact rational.
pub fn min_weighted_sum(u: &[u64], d: u64) -> Result<Rational, FiltrationError> {
    let caps: Vec<Rational> = u.iter().map(|&x| Rational::from_integer(x.into())).collect();
    min_weighted_fill(&caps, &Rational::from_integer(d.into()))
}

/// `sum_j (j - 1 - offset) x_j` over `j = 1..`.
pub fn order_sum(x: &[u64], offset: i64) -> i128 {
    x.iter()
        .enumerate()
        .map(|(j, &xj)| (j as i128 - i128::from(offset)) * i128::from(xj))
        .sum()
}

/// One instance of the combinatorial lemma: capacities, budget and cut-off.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma31Instance {
    pub u: Vec<u64>,
    pub d: u64,
    pub r: usize,
}

/// Random instance with `h <= 8`, `U_j <= 6`, and `d` between the cut-off
/// sum and the total capacity.
pub fn random_lemma31_instance<R: Rng + ?Sized>(rng: &mut R) -> Lemma31Instance {
    let h = rng.gen_range(1..=8);
    let u: Vec<u64> = (0..h).map(|_| rng.gen_range(0..=6)).collect();
    let r = rng.gen_range(0..=h);
    let head: u64 = u[..r].iter().sum();
    let total: u64 = u.iter().sum();
    let d = rng.gen_range(head..=total);
    Lemma31Instance { u, d, r }
}

/// On-disk pair of filtrations; vector entries are `"num/den"` strings.
#[serde_as]
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationDocument {
    pub ambient_dim: usize,
    #[serde_as(as = "Vec<Vec<Vec<DisplayFromStr>>>")]
    pub chain_a: Vec<Vec<Vec<Rational>>>,
    #[serde_as(as = "Vec<Vec<Vec<DisplayFromStr>>>")]
    pub chain_b: Vec<Vec<Vec<Rational>>>,
}

impl FiltrationDocument {
    pub fn parse(text: &str) -> Result<Self, FiltrationError> {
        serde_json::from_str(text).map_err(|e| FiltrationError::Parse(e.to_string()))
    }

    pub fn filtrations(
        &self,
    ) -> Result<(Filtration<Rational>, Filtration<Rational>), FiltrationError> {
        let build = |chain: &Vec<Vec<Vec<Rational>>>| -> Result<Filtration<Rational>, FiltrationError> {
            let levels = chain
                .iter()
                .map(|level| Subspace::span(self.ambient_dim, level.iter().cloned()))
                .collect::<Result<Vec<_>, _>>()?;
            Filtration::new(self.ambient_dim, levels)
        };
        Ok((build(&self.chain_a)?, build(&self.chain_b)?))
    }
}

/// Parses `"3"`, `"-2/5"` into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, FiltrationError> {
    Rational::from_str(text.trim()).map_err(|_| FiltrationError::Parse(format!("bad rational {text:?}")))
}

/// Integer vector as rationals.
pub fn int_vector(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()
}
