//! The ten acceptance criteria, each reported on its own line.
//!
//! Run with `cargo test -p bratteli-core --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bratteli_core::construct::{
    build_rational_family, extend_with_minimal_component, rational_family_matrix, Budgets,
    Details,
};
use bratteli_core::diagram::{count_minimal_components, decompose_classes, Diagram};
use bratteli_core::exactmath::field::FieldElement;
use bratteli_core::exactmath::poly::Polynomial;
use bratteli_core::goodness::{
    bernoulli_type_rational, is_good, is_good_lattice, is_good_rational,
    quotient_condition_witness,
};
use bratteli_core::measure::{build_measure, ergodic_measures, ErgodicMeasure};
use bratteli_core::values::{enumerate_level_values, group_equal, member_s, DEFAULT_ENUM_BUDGET};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn example1() -> Diagram {
    Diagram::from_u64(Some("example 1"), &[vec![1, 1, 0], vec![1, 2, 0], vec![0, 1, 3]]).unwrap()
}

fn example3(n: u64) -> Diagram {
    Diagram::from_u64(None, &[vec![2, 0, 0], vec![1, n, 1], vec![1, 1, n]]).unwrap()
}

/// Fibonacci numbers with `f[1] = f[2] = 1`.
fn fib(n: usize) -> Vec<BigUint> {
    let mut f = vec![BigUint::zero(), BigUint::one()];
    while f.len() <= n {
        let k = f.len();
        let next = &f[k - 1] + &f[k - 2];
        f.push(next);
    }
    f
}

fn criterion_1() -> Check {
    let d = example1();
    let ms = ergodic_measures(&d).map_err(err)?;
    ensure!(ms.len() == 2, "expected 2 ergodic measures, got {}", ms.len());
    let dec = decompose_classes(&d).map_err(err)?;
    let c0 = dec.class(0).map_err(err)?;
    ensure!(
        c0.minpoly == Polynomial::from_ints(&[1, -3, 1]),
        "minimal polynomial is {:?}",
        c0.minpoly
    );
    let probe = rat(2_618_034, 1_000_000);
    ensure!(
        c0.perron.lo() <= &probe && &probe <= c0.perron.hi(),
        "isolating interval [{}, {}] misses 2.618034",
        c0.perron.lo(),
        c0.perron.hi()
    );
    let mu1 = &ms[0];
    ensure!(mu1.support() == [0, 1], "support of mu1 is {:?}", mu1.support());
    let x = mu1.reduced_vector();
    ensure!(
        x[0].coeffs() == [rat(3, 1), rat(-1, 1)] && x[1].coeffs() == [rat(-2, 1), rat(1, 1)],
        "x1 = ({}, {})",
        x[0],
        x[1]
    );
    let mu2 = &ms[1];
    ensure!(
        mu2.lambda().as_rational() == Some(&rat(3, 1)),
        "lambda2 = {}",
        mu2.lambda()
    );
    let x2: Vec<_> = mu2.reduced_vector().iter().map(|e| e.coeffs().to_vec()).collect();
    ensure!(
        x2 == vec![vec![rat(1, 4)], vec![rat(1, 2)], vec![rat(1, 4)]],
        "x2 = {x2:?}"
    );
    Ok(())
}

fn criterion_2() -> Check {
    let f = fib(31);
    let hs = example1().heights_upto(15);
    for n in 1..=15 {
        let h = &hs[n - 1];
        ensure!(h[0] == f[2 * n - 1], "h1 at n = {n} is {}", h[0]);
        ensure!(h[1] == f[2 * n], "h2 at n = {n} is {}", h[1]);
    }
    Ok(())
}

fn criterion_3() -> Check {
    // Here f_0 = f_1 = 1, so f_i is the standard F_{i+1}.
    let std = fib(23);
    let f = |i: usize| BigInt::from(std[i + 1].clone());
    let mu = build_measure(&example1(), 0).map_err(err)?;
    let field = mu.field().clone();
    let base = &FieldElement::from_int(&field, 3) - mu.lambda();
    for n in 1..=10usize {
        let lhs = base.pow(n as i64).map_err(err)?;
        let rhs = FieldElement::from_int_coeffs(&field, &[f(2 * n + 1), -f(2 * n - 1)]);
        ensure!(lhs == rhs, "N = {n}: {lhs} != {rhs}");
    }
    Ok(())
}

fn criterion_4() -> Check {
    let good_set = [3u64, 5, 9, 17, 33];
    for n in 3..=33u64 {
        let mu = build_measure(&example3(n), 1).map_err(err)?;
        let good = is_good(&mu).map_err(err)?.good;
        ensure!(
            good == good_set.contains(&n),
            "N = {n}: is_good returned {good}"
        );
    }
    let mu4 = build_measure(&example3(4), 1).map_err(err)?;
    let v = is_good(&mu4).map_err(err)?;
    ensure!(
        v.residual == Some(BigInt::from(3)),
        "mu4 residual is {:?}",
        v.residual
    );
    Ok(())
}

fn criterion_5() -> Check {
    let d = example1();
    let mu1 = build_measure(&d, 0).map_err(err)?;
    let mu2 = build_measure(&d, 1).map_err(err)?;
    ensure!(is_good(&mu1).map_err(err)?.good, "mu1 not good");
    ensure!(is_good(&mu2).map_err(err)?.good, "mu2 not good");
    ensure!(
        !bernoulli_type_rational(&mu2).map_err(err)?,
        "mu2 reported Bernoulli type"
    );
    let w = quotient_condition_witness(&mu2).map_err(err)?;
    ensure!(w.prime == BigInt::from(5), "witness prime is {}", w.prime);
    let fifth = FieldElement::from_rational(mu2.field(), rat(1, 5));
    ensure!(
        !member_s(&mu2, &fifth).map_err(err)?.member,
        "1/5 reported as a value"
    );
    Ok(())
}

fn oracle_check(mu: &ErgodicMeasure, rng: &mut ChaCha8Rng) -> Check {
    let mut last = Vec::new();
    for n in 1..=4 {
        let vals = enumerate_level_values(mu, n, DEFAULT_ENUM_BUDGET).map_err(err)?;
        for v in &vals {
            ensure!(member_s(mu, v).map_err(err)?.member, "level {n} value {v} rejected");
        }
        last = vals;
    }
    for _ in 0..200 {
        let i = rng.gen_range(0..last.len());
        let j = rng.gen_range(0..last.len());
        let (a, b) = if i <= j { (&last[i], &last[j]) } else { (&last[j], &last[i]) };
        let diff = b - a;
        ensure!(member_s(mu, &diff).map_err(err)?.member, "difference {diff} rejected");
    }
    Ok(())
}

fn criterion_6() -> Check {
    let d = example1();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mu2 = build_measure(&d, 1).map_err(err)?;
    let n4 = enumerate_level_values(&mu2, 4, DEFAULT_ENUM_BUDGET).map_err(err)?;
    // 14 * 22 * 54 = 16632 tuples collapse onto the multiples of 1/108.
    let h = d.heights(4).map_err(err)?;
    let tuples: BigUint = h.iter().map(|x| x + 1u32).product();
    ensure!(tuples == BigUint::from(16632u32), "{tuples} tuples at level 4");
    let expect: Vec<BigRational> = (0..=108).map(|k| rat(k, 108)).collect();
    let got: Vec<BigRational> = n4.iter().map(|v| v.coeffs()[0].clone()).collect();
    ensure!(got == expect, "level 4 values are not the multiples of 1/108");
    oracle_check(&mu2, &mut rng)?;
    let mu1 = build_measure(&d, 0).map_err(err)?;
    oracle_check(&mu1, &mut rng)
}

fn criterion_7() -> Check {
    let a0 = rational_family_matrix(4, 3, 0).map_err(err)?;
    let pinned: Vec<Vec<BigInt>> = [[2, 1, 0, 0], [0, 2, 1, 0], [0, 0, 2, 1], [1, 0, 0, 2]]
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    ensure!(a0 == pinned, "A0 = {a0:?}");
    let mu2 = build_measure(&example1(), 1).map_err(err)?;
    for i in 0..=3 {
        let res = build_rational_family(4, 3, i).map_err(err)?;
        ensure!(
            group_equal(&mu2, &res.measure).map_err(err)?.equal,
            "i = {i}: values set differs from mu2"
        );
        ensure!(is_good(&res.measure).map_err(err)?.good, "i = {i}: not good");
        let m = count_minimal_components(&res.diagram);
        ensure!(m == i.max(1), "i = {i}: {m} minimal components");
    }
    Ok(())
}

fn criterion_8() -> Check {
    let src = Diagram::from_u64(Some("fibonacci"), &[vec![1, 1], vec![1, 2]]).map_err(err)?;
    let mu = build_measure(&src, 0).map_err(err)?;
    let res = extend_with_minimal_component(&mu, &Budgets::default()).map_err(err)?;
    let Details::Extension { z, psi, .. } = &res.details else {
        return Err("wrong construction details".into());
    };
    let q = res.diagram.a_matrix();
    let field = mu.field();
    for (i, row) in q.iter().enumerate() {
        let mut acc = field.zero();
        for (j, a) in row.iter().enumerate() {
            acc = &acc + &z[j].scale(&BigRational::from_integer(a.clone()));
        }
        ensure!(acc == psi * &z[i], "Q z != psi z in row {i}");
    }
    let total = z.iter().fold(field.zero(), |acc, v| &acc + v);
    ensure!(total.is_one(), "z sums to {total}");
    ensure!(
        group_equal(&mu, &res.measure).map_err(err)?.equal,
        "values set differs from the source"
    );
    ensure!(is_good(&res.measure).map_err(err)?.good, "new measure not good");
    let before = count_minimal_components(&src);
    let after = count_minimal_components(&res.diagram);
    ensure!(
        after == before + 1,
        "minimal components {before} -> {after}: the new vertex lies below the class, which stops being minimal"
    );
    Ok(())
}

fn criterion_9() -> Check {
    let p = [[1i64, 2, 0], [1, 2, 1], [9, 3, 2]];
    let y = [rat(1, 8), rat(2, 8), rat(5, 8)];
    for (i, row) in p.iter().enumerate() {
        let s: BigRational = row
            .iter()
            .zip(&y)
            .map(|(&a, yj)| yj * BigInt::from(a))
            .sum();
        ensure!(s == &y[i] * BigInt::from(5), "P y != 5 y in row {i}");
    }
    let f: Vec<Vec<u64>> = (0..3).map(|v| (0..3).map(|w| p[w][v] as u64).collect()).collect();
    let d = Diagram::from_u64(Some("witness"), &f).map_err(err)?;
    let nu = build_measure(&d, 0).map_err(err)?;
    let xs: Vec<_> = nu.reduced_vector().iter().map(|e| e.coeffs()[0].clone()).collect();
    ensure!(xs == y, "measure of the witness diagram is {xs:?}");
    ensure!(is_good(&nu).map_err(err)?.good, "witness measure not good");
    let mu4 = build_measure(&example3(4), 1).map_err(err)?;
    ensure!(group_equal(&mu4, &nu).map_err(err)?.equal, "values sets differ");
    ensure!(!is_good(&mu4).map_err(err)?.good, "mu4 reported good");
    Ok(())
}

fn random_diagram(rng: &mut ChaCha8Rng) -> Diagram {
    loop {
        let n = rng.gen_range(1..=5);
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=3) }).collect())
            .collect();
        if let Ok(d) = Diagram::from_u64(None, &rows) {
            return d;
        }
    }
}

/// `reach[u][v]`: a path of positive length or zero leads from `u` up to `v`.
fn brute_reach(d: &Diagram) -> Vec<Vec<bool>> {
    let n = d.size();
    let mut r: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| u == v || !d.entry(v, u).is_zero()).collect())
        .collect();
    for k in 0..n {
        for u in 0..n {
            for v in 0..n {
                if r[u][k] && r[k][v] {
                    r[u][v] = true;
                }
            }
        }
    }
    r
}

fn structural_checks(d: &Diagram) -> Check {
    let n = d.size();
    let dec = decompose_classes(d).map_err(err)?;
    let reach = brute_reach(d);
    let vc = dec.vertex_class();
    for u in 0..n {
        for v in 0..n {
            let same = reach[u][v] && reach[v][u];
            ensure!(same == (vc[u] == vc[v]), "partition mismatch at ({u}, {v})");
            ensure!(
                reach[u][v] == dec.above_or_equal(vc[v], vc[u]),
                "order mismatch at ({u}, {v})"
            );
            if reach[u][v] && vc[u] != vc[v] {
                ensure!(vc[u] < vc[v], "class order is not topological");
            }
        }
    }
    let a = d.a_matrix();
    for c in dec.classes.iter().filter(|c| c.distinguished) {
        let mu = build_measure(d, c.id).map_err(err)?;
        let field = mu.field();
        let lat = mu.lattice().map_err(err)?;
        for j in 0..field.degree() {
            let row = &lat.basis()[j];
            let b = FieldElement::new(
                field,
                row.iter()
                    .map(|x| BigRational::new(x.clone(), lat.den().clone()))
                    .collect(),
            );
            ensure!(lat.contains(&(mu.lambda() * &b)), "lambda H not inside H");
        }
        let x: Vec<FieldElement> = (0..n).map(|v| mu.x_of(v).unwrap()).collect();
        for i in 0..n {
            let mut acc = field.zero();
            for j in 0..n {
                acc = &acc + &x[j].scale(&BigRational::from_integer(a[i][j].clone()));
            }
            ensure!(acc == mu.lambda() * &x[i], "eigen residual nonzero at {i}");
        }
        for (level, h) in d.heights_upto(6).iter().enumerate() {
            let scale = mu.lambda().pow(-(level as i64)).map_err(err)?;
            let mut total = field.zero();
            for v in 0..n {
                let hv = BigRational::from_integer(BigInt::from(h[v].clone()));
                total = &total + &(&x[v] * &scale).scale(&hv);
            }
            ensure!(total.is_one(), "total mass at level {} is {total}", level + 1);
        }
        if mu.is_rational() && !mu.non_alpha().is_empty() {
            let r = is_good_rational(&mu).map_err(err)?.good;
            let l = is_good_lattice(&mu).map_err(err)?.good;
            ensure!(r == l, "goodness branches disagree ({r} vs {l})");
        }
    }
    Ok(())
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..500 {
        let d = random_diagram(&mut rng);
        structural_checks(&d).map_err(|e| format!("diagram {k} {:?}: {e}", d.incidence()))?;
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("example 1 classification", criterion_1),
        ("example 1 heights are Fibonacci numbers", criterion_2),
        ("field identity for (3 - l)^N", criterion_3),
        ("example 3 goodness sweep", criterion_4),
        ("example 1 verdicts", criterion_5),
        ("enumeration agrees with membership", criterion_6),
        ("rational construction", criterion_7),
        ("irrational construction", criterion_8),
        ("simple witness with equal values set", criterion_9),
        ("structural invariants on random diagrams", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(r) => r,
            Err(_) => Err("panicked".into()),
        };
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name}", i + 1),
            Err(e) => {
                println!("criterion {:>2}: FAIL  {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
