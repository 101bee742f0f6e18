//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's arithmetic; inputs and outputs are compared only.
#![allow(dead_code)]

use intpoints::Rational;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use rand::Rng;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rank by plain Gaussian elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..ncols {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// `v` lies in the span of `rows`.
pub fn in_span(rows: &[Vec<Rational>], v: &[Rational]) -> bool {
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    rank(&ext) == rank(rows)
}

/// Checks that `basis` is a basis of `Q^d` and that, for each level given
/// by spanning vectors, the basis members inside the level span it.
pub fn adapted_oracle(d: usize, basis: &[Vec<Rational>], levels: &[Vec<Vec<Rational>>]) -> bool {
    if basis.len() != d || rank(basis) != d {
        return false;
    }
    levels.iter().all(|level| {
        let dim = rank(level);
        let inside: Vec<Vec<Rational>> = basis.iter().filter(|b| in_span(level, b)).cloned().collect();
        inside.len() == dim && rank(&inside) == dim
    })
}

/// Random descending chain: level `t` spans a prefix of one random list of
/// small integer vectors, with prefix lengths non-increasing.
pub fn random_chain<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<Vec<Rational>>> {
    let pool_len = rng.gen_range(0..=d + 2);
    let pool: Vec<Vec<Rational>> = (0..pool_len)
        .map(|_| (0..d).map(|_| q(rng.gen_range(-2..=2))).collect())
        .collect();
    let levels = rng.gen_range(0..=4);
    let mut len = pool_len;
    let mut chain = Vec::new();
    for _ in 0..levels {
        len = rng.gen_range(0..=len);
        chain.push(pool[..len].to_vec());
    }
    chain
}

/// Minimum of `sum j x_j` over integer `0 <= x_j <= U_j`, `sum x_j = d`,
/// by exhaustive enumeration.
pub fn brute_min_weighted(u: &[u64], d: u64) -> Option<u64> {
    fn go(u: &[u64], j: usize, left: u64, acc: u64, best: &mut Option<u64>) {
        if j == u.len() {
            if left == 0 {
                *best = Some(best.map_or(acc, |b| b.min(acc)));
            }
            return;
        }
        for x in 0..=u[j].min(left) {
            go(u, j + 1, left - x, acc + (j as u64 + 1) * x, best);
        }
    }
    let mut best = None;
    go(u, 0, d, 0, &mut best);
    best
}

/// Intersection numbers from the matrix: `(D^2, (D.D_i), D_i^2)`.
pub fn intersections(p: &[i64], m: &[Vec<i64>]) -> (BigInt, Vec<BigInt>, Vec<BigInt>) {
    let r = p.len();
    let d_dot: Vec<BigInt> = (0..r)
        .map(|i| (0..r).map(|j| BigInt::from(p[j]) * m[i][j]).sum())
        .collect();
    let d_sq = (0..r).map(|i| BigInt::from(p[i]) * &d_dot[i]).sum();
    let self_int = (0..r).map(|i| BigInt::from(m[i][i])).collect();
    (d_sq, d_dot, self_int)
}

/// Value of `2 D^2 xi - (D.D_i) xi^2 - 3 D^2 p` at a rational `xi`.
pub fn margin_at(d_sq: &BigInt, d_dot: &BigInt, p: i64, xi: &Rational) -> Rational {
    let dsq = Rational::from_integer(d_sq.clone());
    let dd = Rational::from_integer(d_dot.clone());
    q(2) * &dsq * xi - dd * xi * xi - q(3) * dsq * q(p)
}

/// `0 < lambda < xi` where `xi` is the least positive root of
/// `a x^2 - 2 b x + c` (`c > 0`, `b > 0`), decided without the root.
pub fn below_least_root(a: &BigInt, b: &BigInt, c: &BigInt, lambda: &Rational) -> bool {
    let (a, b, c) = (
        Rational::from_integer(a.clone()),
        Rational::from_integer(b.clone()),
        Rational::from_integer(c.clone()),
    );
    if !lambda.is_positive() {
        return false;
    }
    let value = &a * lambda * lambda - q(2) * &b * lambda + &c;
    // the quadratic is positive and decreasing on [0, xi)
    let before_turn = if a.is_positive() { lambda < &(&b / &a) } else { true };
    value.is_positive() && before_turn
}

/// Machine-word rational; arithmetic panics on overflow in test builds.
pub type Small = Ratio<i128>;

pub fn small(v: &Rational) -> Small {
    Small::new(
        v.numer().to_i128().expect("numerator fits i128"),
        v.denom().to_i128().expect("denominator fits i128"),
    )
}

/// Multiplication in `Q[X] / (X^2 - T X + n)` on pairs `(c0, c1)`.
pub fn alg_mul<T: Clone + Num>(t: &T, n: &T, x: &(T, T), y: &(T, T)) -> (T, T) {
    let bd = x.1.clone() * y.1.clone();
    (
        x.0.clone() * y.0.clone() - bd.clone() * n.clone(),
        x.0.clone() * y.1.clone() + x.1.clone() * y.0.clone() + bd * t.clone(),
    )
}

pub fn is_rational_square(v: &Rational) -> bool {
    let sq = |n: &BigInt| !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    };
    sq(v.numer()) && sq(v.denom())
}
