//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons
//! only. Runs without the libtest harness so the lines always print.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use intpoints::criterion::{self, check_main_theorem, condition_ii};
use intpoints::deskmodel::{self, Boundary, DeskInstance};
use intpoints::exactnum::QuadNum;
use intpoints::filtration::{self, Filtration, Subspace};
use intpoints::pellpoints::{self, EX13_CURVE};
use intpoints::surface::{self, SurfaceInstance};
use intpoints::{fixtures, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn instance(p: Vec<i64>, m: Vec<Vec<i64>>) -> SurfaceInstance {
    SurfaceInstance::new(None, p, m, true, true).expect("valid instance")
}

/// Constant products `p_i p_j M_ij = c` give `xi_i = r p_i`, and the
/// criterion holds exactly when `r >= 4`.
fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cases = 0;
    for r in 2..=8usize {
        for _ in 0..40 {
            let p: Vec<i64> = (0..r).map(|_| rng.gen_range(1..=4)).collect();
            let l = p.iter().fold(1i64, |a, &b| a.lcm(&b));
            let c = rng.gen_range(1..=3) * l * l;
            let m: Vec<Vec<i64>> = (0..r)
                .map(|i| (0..r).map(|j| c / (p[i] * p[j])).collect())
                .collect();
            let inst = instance(p.clone(), m.clone());
            let derived = surface::derive(&inst);
            let (d_sq, d_dot, _) = intersections(&p, &m);
            for i in 0..r {
                let crit = condition_ii(&inst, &derived, i).map_err(|e| e.to_string())?;
                let expected_xi = q(r as i64 * p[i]);
                ensure(crit.xi == QuadNum::from_rational(expected_xi.clone()), || {
                    format!("r={r} p={p:?} i={i}: xi = {}", crit.xi)
                })?;
                let margin = margin_at(&d_sq, &d_dot[i], p[i], &expected_xi);
                ensure(crit.margin == QuadNum::from_rational(margin.clone()), || {
                    format!("r={r} p={p:?} i={i}: margin {} vs {margin}", crit.margin)
                })?;
                ensure(crit.holds == (r >= 4) && margin.is_positive() == (r >= 4), || {
                    format!("r={r} p={p:?} i={i}: holds = {}", crit.holds)
                })?;
                cases += 1;
            }
            let report = check_main_theorem(&inst).map_err(|e| e.to_string())?;
            ensure(report.theorem1.c == Some(BigInt::from(c)), || format!("r={r}: c not recovered"))?;
            ensure(report.main_theorem_holds == (r >= 4), || format!("r={r}: verdict"))?;
        }
    }
    Ok(format!("{cases} divisors over r = 2..8"))
}

/// Product of two curves with `s` boundary points: margin `4s^3 - s^3 - 6s^2`.
fn criterion_2() -> Outcome {
    for s in 2..=10usize {
        let inst = deskmodel::build_product_curve_instance(s).map_err(|e| e.to_string())?;
        let derived = surface::derive(&inst);
        let s_i = s as i64;
        let expected = q(4 * s_i.pow(3) - s_i.pow(3) - 6 * s_i * s_i);
        for i in 0..2 * s {
            let crit = condition_ii(&inst, &derived, i).map_err(|e| e.to_string())?;
            ensure(crit.xi == QuadNum::from_int(s_i), || format!("s={s}: xi = {}", crit.xi))?;
            ensure(crit.margin == QuadNum::from_rational(expected.clone()), || {
                format!("s={s}: margin {} vs {expected}", crit.margin)
            })?;
            ensure(crit.holds == (s >= 3), || format!("s={s}: holds = {}", crit.holds))?;
        }
        let report = check_main_theorem(&inst).map_err(|e| e.to_string())?;
        ensure(report.main_theorem_holds == (s >= 3), || format!("s={s}: verdict"))?;
    }
    Ok("s = 2..10, s = 3 margin 108 - 81 = 27".into())
}

/// Four lines on `P^1 x P^1`: every margin is exactly zero.
fn criterion_3() -> Outcome {
    let inst = fixtures::builtin("p1xp1-4lines").unwrap().map_err(|e| e.to_string())?;
    let report = check_main_theorem(&inst).map_err(|e| e.to_string())?;
    let (d_sq, d_dot, _) = intersections(inst.p(), inst.matrix());
    for d in &report.divisors {
        ensure(d.margin.is_zero() && !d.holds, || format!("D{}: margin {}", d.index + 1, d.margin))?;
        // xi = 2 from D^2 = 8, (D.D_i) = 2, D_i^2 = 0
        ensure(margin_at(&d_sq, &d_dot[d.index], 1, &q(2)).is_zero(), || "oracle margin".into())?;
    }
    ensure(!report.theorem1.applicable, || "constant-product criterion applied".into())?;
    ensure(!report.main_theorem_holds, || "verdict holds".into())?;
    Ok("4 margins equal 0, constant-product criterion inapplicable".into())
}

/// Dimension counts on `P^1 x P^1` for `s <= 5`, `N <= 4`.
fn criterion_4() -> Outcome {
    for s in 1..=5usize {
        for n in 1..=4usize {
            let inst = DeskInstance::new(s, n).map_err(|e| e.to_string())?;
            let side = (n * s + 1) as i64;
            let d = deskmodel::vn_dimension(s, n).map_err(|e| e.to_string())? as i64;
            ensure(d == side * side, || format!("s={s} N={n}: d = {d}"))?;
            let half = (n * n) as i64 * (2 * s * s) as i64 / 2;
            ensure((d - half).abs() == 2 * (n * s) as i64 + 1, || format!("s={s} N={n}: Riemann-Roch defect"))?;
            let x = deskmodel::filtration_dims(&inst, Boundary::Vertical(0)).map_err(|e| e.to_string())?;
            let u_j = 1 + (n * s) as u64;
            ensure(x.len() as i64 == side && x.iter().all(|&xj| xj == u_j), || {
                format!("s={s} N={n}: x = {x:?}, U_j = {u_j}")
            })?;
            let sum: i64 = x
                .iter()
                .enumerate()
                .map(|(j, &xj)| (j as i64 - n as i64) * xj as i64)
                .sum();
            let closed = side * side * n as i64 * (s as i64 - 2);
            ensure(2 * sum == closed, || format!("s={s} N={n}: order sum {sum}"))?;
            ensure((sum > 0) == (s >= 3), || format!("s={s} N={n}: positivity"))?;
            let check = deskmodel::order_sum_check(&inst).map_err(|e| e.to_string())?;
            ensure(check.sum == sum as i128 && check.positive == (s >= 3), || "order_sum_check".into())?;
        }
    }
    Ok("20 (s, N) pairs".into())
}

/// Weighted-sum lower bound on seeded random instances.
fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut brute, mut violations) = (0, 0);
    for _ in 0..1000 {
        let inst = filtration::random_lemma31_instance(&mut rng);
        let bound = filtration::lemma31_bound(&inst.u, inst.d, inst.r).map_err(|e| e.to_string())?;
        let min = filtration::min_weighted_sum(&inst.u, inst.d).map_err(|e| e.to_string())?;
        let direct: u128 = inst.u[..inst.r]
            .iter()
            .enumerate()
            .map(|(j, &x)| (j as u128 + 1) * x as u128)
            .sum();
        ensure(bound == direct, || format!("{inst:?}: bound {bound} vs {direct}"))?;
        if min < Rational::from_integer(BigInt::from(bound)) {
            violations += 1;
        }
        if inst.u.iter().sum::<u64>() <= 12 {
            let b = brute_min_weighted(&inst.u, inst.d).ok_or("brute force infeasible")?;
            ensure(min == q(b as i64), || format!("{inst:?}: min {min} vs brute {b}"))?;
            brute += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("1000 instances, 0 violations, {brute} brute-force matches"))
}

/// Common adapted bases for seeded random filtration pairs.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..200 {
        let d = rng.gen_range(1..=12);
        let ca = random_chain(&mut rng, d);
        let cb = random_chain(&mut rng, d);
        let build = |chain: &[Vec<Vec<Rational>>]| -> Filtration<Rational> {
            let levels = chain
                .iter()
                .map(|l| Subspace::span(d, l.iter().cloned()).unwrap())
                .collect();
            Filtration::new(d, levels).unwrap()
        };
        let (f, g) = (build(&ca), build(&cb));
        let basis = filtration::common_adapted_basis(&f, &g).map_err(|e| e.to_string())?;
        ensure(filtration::verify_adapted(&basis.vectors, &f, &g), || format!("trial {trial}: verify_adapted"))?;
        let levels: Vec<Vec<Vec<Rational>>> = ca.iter().chain(&cb).cloned().collect();
        ensure(adapted_oracle(d, &basis.vectors, &levels), || format!("trial {trial}: oracle"))?;
    }
    Ok("200 pairs, ambient dimension <= 12".into())
}

/// First ten quadratic points on the two Pell equations.
fn criterion_7() -> Outcome {
    let batch = pellpoints::two_pell_points(10);
    ensure(batch.points.len() == 10, || "fewer than 10 points".into())?;
    let mut found = false;
    for p in &batch.points {
        ensure(&p.t * &p.t - BigInt::from(2) * &p.v * &p.v == BigInt::from(1), || format!("t^2 - 2v^2 at {}", p.t))?;
        let m: BigInt = BigInt::from(3) * &p.v * &p.v + 1;
        // u = b sqrt(k), so u^2 = b^2 k
        ensure(p.u.a().is_zero(), || "u has a rational part".into())?;
        let u_sq = p.u.b() * p.u.b() * Rational::from_integer(p.u.radicand().clone());
        ensure(u_sq == Rational::from_integer(m.clone()), || format!("u^2 - 3v^2 at v = {}", p.v))?;
        ensure(!is_rational_square(&Rational::from_integer(m)), || "u is rational".into())?;
        found |= p.t == BigInt::from(3) && p.v == BigInt::from(2) && p.u == QuadNum::sqrt(13).unwrap();
    }
    ensure(found, || "(3, sqrt(13), 2) missing".into())?;
    Ok("10 points, zero residuals, (t, u, v) = (3, sqrt(13), 2) present".into())
}

/// Every point from `{2,3}`-units with exponents up to 4 lies on the curve.
fn criterion_8() -> Outcome {
    let b = pellpoints::ex13_box(4);
    let sq = |v: i128| v >= 0 && {
        let r = (v as f64).sqrt() as i128;
        (r - 1..=r + 1).any(|c| c >= 0 && c * c == v)
    };
    let zero = Small::zero();
    let one = Small::one();
    for p in &b.points {
        let (r, s) = (small(&p.r), small(&p.s));
        let (t, n) = (small(&p.point.trace), small(&p.point.norm));
        ensure(p.point.curve == EX13_CURVE, || "curve".into())?;
        ensure(t == s - r - one && n == r, || format!("r={r} s={s}: trace/norm"))?;
        let disc = t * t - Small::from_integer(4) * n;
        ensure(!(sq(*disc.numer()) && sq(*disc.denom())), || format!("r={r} s={s}: rational point"))?;
        let x = (zero, one);
        let x1 = (one, one);
        // norm(a + bX) = a^2 + a b T + b^2 n
        let norm = |e: &(Small, Small)| e.0 * e.0 + e.0 * e.1 * t + e.1 * e.1 * n;
        ensure(norm(&x) == r && norm(&x1) == s, || format!("r={r} s={s}: norms"))?;
        let y = (small(&p.y.c0), small(&p.y.c1));
        let prod = alg_mul(&t, &n, &alg_mul(&t, &n, &x, &x1), &y);
        ensure(prod == (one, zero), || format!("r={r} s={s}: x(x+1)y = {prod:?}"))?;
    }
    ensure(b.points.len() + b.skipped == 162 * 162, || "box size".into())?;
    Ok(format!("{} points verified, {} rational pairs skipped", b.points.len(), b.skipped))
}

/// Certified rational windows below `xi` on every fixture where the
/// criterion holds.
fn criterion_9() -> Outcome {
    let mut windows = 0;
    for name in fixtures::builtin_names() {
        let inst = fixtures::builtin(name).unwrap().map_err(|e| e.to_string())?;
        let Ok(report) = check_main_theorem(&inst) else {
            continue;
        };
        let (d_sq, d_dot, self_int) = intersections(inst.p(), inst.matrix());
        for d in report.divisors.iter().filter(|d| d.holds) {
            let i = d.index;
            let w = criterion::lambda_window(&inst, &report.derived, i).map_err(|e| format!("{name}: {e}"))?;
            let l = &w.lambda;
            let dd = Rational::from_integer(d_dot[i].clone());
            let di2 = Rational::from_integer(self_int[i].clone());
            let dsq = Rational::from_integer(d_sq.clone());
            let cubic = l * l * &dd / q(2) - l * l * l * &di2 / q(3) - &dsq * q(inst.p()[i]) / q(2);
            let quad = &dd * l - &di2 * l * l / q(2);
            ensure(cubic.is_positive() && cubic == w.cubic_value, || format!("{name} D{}: cubic {cubic}", i + 1))?;
            ensure(quad < &dsq / q(2), || format!("{name} D{}: quadratic {quad}", i + 1))?;
            ensure(below_least_root(&self_int[i], &d_dot[i], &d_sq, l), || format!("{name} D{}: lambda >= xi", i + 1))?;
            windows += 1;
        }
    }
    ensure(windows > 0, || "no windows".into())?;
    Ok(format!("{windows} windows certified"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("constant-product reduction", criterion_1, Duration::from_secs(1)),
        ("product-curve family", criterion_2, Duration::from_secs(1)),
        ("four lines boundary case", criterion_3, Duration::from_secs(1)),
        ("desk Riemann-Roch", criterion_4, Duration::from_secs(5)),
        ("weighted-sum bound oracle", criterion_5, Duration::from_secs(10)),
        ("common adapted basis", criterion_6, Duration::from_secs(10)),
        ("two Pell equations", criterion_7, Duration::from_secs(1)),
        ("S-unit family on X(X+1)Y = 1", criterion_8, Duration::from_secs(1)),
        ("lambda window certification", criterion_9, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => {
                let slow = if elapsed > *budget { format!(" (over {budget:?} budget)") } else { String::new() };
                println!("criterion {}: PASS {name}: {detail} [{elapsed:.2?}]{slow}", k + 1);
            }
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
