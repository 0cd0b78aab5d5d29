//! Factorization of rational polynomials into irreducibles over Q.
//!
//! Rational roots are extracted first; the remaining part is split by
//! Kronecker's method, which is adequate for the small degrees used here.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::interpolate;
use super::poly::{int_rat, rat, Polynomial, Rational};
use super::roots::isolate_real_roots;
use crate::error::{Error, Result};

/// Default bound on the degree of polynomials that will be factored.
pub const DEFAULT_DEGREE_BOUND: usize = 12;

/// `p = content * prod f^e`, each `f` primitive integral with positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub content: Rational,
    pub factors: Vec<(Polynomial, usize)>,
}

impl Factorization {
    pub fn product(&self) -> Polynomial {
        let mut acc = Polynomial::constant(self.content.clone());
        for (f, e) in &self.factors {
            acc = &acc * &f.pow(*e);
        }
        acc
    }
}

pub fn factor_over_rationals(p: &Polynomial, degree_bound: usize) -> Result<Factorization> {
    if p.degree() > degree_bound {
        return Err(Error::UnsupportedDegree {
            degree: p.degree(),
            bound: degree_bound,
        });
    }
    let (content, _) = p.content_primitive();
    let mut factors = Vec::new();
    for (f, e) in p.squarefree_decomposition() {
        for g in factor_squarefree(&f)? {
            factors.push((g, e));
        }
    }
    factors.sort_by(|(a, ea), (b, eb)| factor_order(a, b).then(ea.cmp(eb)));
    Ok(Factorization { content, factors })
}

/// Whether a non-constant polynomial is irreducible over Q.
pub fn is_irreducible(p: &Polynomial, degree_bound: usize) -> Result<bool> {
    if p.degree() == 0 {
        return Ok(false);
    }
    let f = factor_over_rationals(p, degree_bound)?;
    Ok(f.factors.len() == 1 && f.factors[0].1 == 1)
}

fn factor_order(a: &Polynomial, b: &Polynomial) -> std::cmp::Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            match x.cmp(y) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Factors a primitive squarefree polynomial.
fn factor_squarefree(f: &Polynomial) -> Result<Vec<Polynomial>> {
    let mut out = Vec::new();
    let mut g = f.primitive();
    for r in rational_roots(&g) {
        let lin = Polynomial::linear_root(&r).primitive();
        g = g.div_rem(&lin).0.primitive();
        out.push(lin);
    }
    if g.degree() >= 1 {
        if g.degree() <= 3 {
            out.push(g);
        } else {
            kronecker(&g, &mut out)?;
        }
    }
    Ok(out)
}

/// All rational roots of a primitive integral squarefree polynomial.
pub fn rational_roots(f: &Polynomial) -> Vec<Rational> {
    let lc = f.leading().abs().to_integer();
    let step = Rational::new(BigInt::one(), lc.clone());
    let mut out = Vec::new();
    for mut root in isolate_real_roots(f) {
        if let Some(r) = root.as_rational() {
            out.push(r.clone());
            continue;
        }
        // Candidates have the form c / lc; once the interval is narrower than
        // 1 / lc at most one of them lies inside.
        root.refine_to(&step);
        if let Some(r) = root.as_rational() {
            out.push(r.clone());
            continue;
        }
        let c = (root.lo() * int_rat(&lc)).floor() + rat(1);
        let cand = c / int_rat(&lc);
        if &cand < root.hi() && f.sign_at(&cand) == 0 {
            out.push(cand);
        }
    }
    out
}

fn kronecker(g: &Polynomial, out: &mut Vec<Polynomial>) -> Result<()> {
    let n = g.degree();
    for d in 2..=n / 2 {
        if let Some(h) = kronecker_find(g, d)? {
            let rest = g.div_rem(&h).0.primitive();
            kronecker(&h, out)?;
            kronecker(&rest, out)?;
            return Ok(());
        }
    }
    out.push(g.primitive());
    Ok(())
}

/// Searches for a factor of exact degree `d`.
fn kronecker_find(g: &Polynomial, d: usize) -> Result<Option<Polynomial>> {
    let mut pool: Vec<(usize, BigInt, Vec<BigInt>)> = Vec::new();
    let mut k: i64 = 0;
    while pool.len() < 3 * (d + 1) + 2 {
        let x = if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 };
        k += 1;
        let v = g.eval(&rat(x)).to_integer();
        if v.is_zero() {
            continue;
        }
        let divs = divisors(&v.magnitude().clone())?;
        pool.push((divs.len(), BigInt::from(x), divs));
    }
    pool.sort_by_key(|(n, _, _)| *n);
    pool.truncate(d + 1);
    let xs: Vec<Rational> = pool.iter().map(|(_, x, _)| int_rat(x)).collect();
    let choices: Vec<Vec<BigInt>> = pool
        .iter()
        .enumerate()
        .map(|(i, (_, _, divs))| {
            let mut c = Vec::new();
            for dv in divs {
                c.push(dv.clone());
                if i > 0 {
                    c.push(-dv.clone());
                }
            }
            c
        })
        .collect();
    let mut idx = vec![0usize; d + 1];
    loop {
        let ys: Vec<Rational> = idx
            .iter()
            .enumerate()
            .map(|(i, &j)| int_rat(&choices[i][j]))
            .collect();
        let h = interpolate(&xs, &ys);
        if h.degree() == d && h.integer_coeffs().is_some() {
            let (_, r) = g.div_rem(&h);
            if r.is_zero() {
                return Ok(Some(h.primitive()));
            }
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Ok(None);
            }
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

const TRIAL_LIMIT: u64 = 2_000_000;

/// Prime factorization by trial division; fails on numbers with two large prime factors.
pub fn factorize(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    let mut n = n.clone();
    let mut out = Vec::new();
    if n.is_zero() {
        return Err(Error::Internal("factorize(0)".into()));
    }
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        let lim = BigUint::from(p);
        if &lim * &lim <= n {
            return Err(Error::Unsupported(format!(
                "cannot factor {n} by trial division"
            )));
        }
        out.push((n, 1));
    }
    Ok(out)
}

/// Distinct prime divisors of a non-zero integer.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    Ok(factorize(n.magnitude())?
        .into_iter()
        .map(|(p, _)| BigInt::from_biguint(Sign::Plus, p))
        .collect())
}

/// Positive divisors in increasing order.
pub fn divisors(n: &BigUint) -> Result<Vec<BigInt>> {
    let mut divs = vec![BigUint::one()];
    for (p, e) in factorize(n)? {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = d.clone();
            for _ in 0..=e {
                next.push(pk.clone());
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs
        .into_iter()
        .map(|d| BigInt::from_biguint(Sign::Plus, d))
        .collect())
}

/// Removes from `a` every prime factor it shares with `b`; returns the residual.
pub fn strip_common_factors(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    loop {
        let g = a.gcd(b);
        if g.is_one() || g.is_zero() {
            return a;
        }
        a /= g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_product_of_quadratics() {
        let a = Polynomial::from_ints(&[1, -3, 1]);
        let b = Polynomial::from_ints(&[2, 0, 1]);
        let c = Polynomial::from_ints(&[-1, 2]);
        let p = &(&a * &b) * &(&c * &c);
        let f = factor_over_rationals(&p, 12).unwrap();
        assert_eq!(f.product(), p);
        assert_eq!(
            f.factors,
            vec![(c.clone(), 2), (a.clone(), 1), (b.clone(), 1)]
        );
    }

    #[test]
    fn irreducible_quartic() {
        // t^4 - 10 t^2 + 1, minimal polynomial of sqrt2 + sqrt3.
        let p = Polynomial::from_ints(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&p, 12).unwrap());
        // t^4 + 4 = (t^2 + 2t + 2)(t^2 - 2t + 2)
        let q = Polynomial::from_ints(&[4, 0, 0, 0, 1]);
        let f = factor_over_rationals(&q, 12).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.product(), q);
    }

    #[test]
    fn degree_bound_enforced() {
        let p = Polynomial::monomial(rat(1), 13);
        assert!(matches!(
            factor_over_rationals(&p, 12),
            Err(Error::UnsupportedDegree { degree: 13, bound: 12 })
        ));
    }

    #[test]
    fn finds_rational_roots() {
        let p = Polynomial::from_ints(&[-2, -1, 2, 1]); // (t - 1)(t + 1)(t + 2)
        let mut r = rational_roots(&p);
        r.sort();
        assert_eq!(r, vec![rat(-2), rat(-1), rat(1)]);
        let q = Polynomial::from_ints(&[-3, 2]); // 2t - 3
        assert_eq!(rational_roots(&q), vec![Rational::new(3.into(), 2.into())]);
    }

    #[test]
    fn stripping() {
        assert_eq!(strip_common_factors(&BigInt::from(12), &BigInt::from(6)), BigInt::one());
        assert_eq!(strip_common_factors(&BigInt::from(3), &BigInt::from(5)), BigInt::from(3));
        assert_eq!(strip_common_factors(&BigInt::from(18), &BigInt::from(2)), BigInt::from(9));
    }
}
