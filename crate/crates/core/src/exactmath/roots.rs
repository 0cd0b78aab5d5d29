//! Real root isolation with Sturm sequences and exact real comparison.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{rat, Polynomial, Rational};

/// A real algebraic number: the unique root of `poly` in the open interval
/// `(lo, hi)`, or the rational `lo` itself when `lo == hi`.
#[derive(Clone, Debug)]
pub struct RealAlgebraic {
    poly: Polynomial,
    lo: Rational,
    hi: Rational,
}

impl RealAlgebraic {
    pub fn from_rational(r: Rational) -> Self {
        RealAlgebraic {
            poly: Polynomial::linear_root(&r).primitive(),
            lo: r.clone(),
            hi: r,
        }
    }

    /// Caller guarantees that `poly` is squarefree with exactly one root in `(lo, hi)`.
    pub fn from_parts(poly: Polynomial, lo: Rational, hi: Rational) -> Self {
        RealAlgebraic { poly, lo, hi }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_exact() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Halves the isolating interval, collapsing onto the midpoint if it is the root.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / rat(2);
        let sm = self.poly.sign_at(&mid);
        if sm == 0 {
            *self = RealAlgebraic::from_rational(mid);
            return;
        }
        let slo = self.poly.sign_at(&self.lo);
        if slo == sm {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    pub fn refine_to(&mut self, width: &Rational) {
        while !self.is_exact() && &self.width() >= width {
            self.bisect();
        }
    }

    pub fn refined(&self, width: &Rational) -> Self {
        let mut r = self.clone();
        r.refine_to(width);
        r
    }

    pub fn to_f64(&self) -> f64 {
        let mut r = self.clone();
        loop {
            if r.is_exact() {
                return rational_to_f64(&r.lo);
            }
            let mag = r.lo.abs().max(r.hi.abs());
            let tol = &mag * Rational::new(BigInt::one(), BigInt::one() << 60usize);
            if r.width() <= tol || r.width() < Rational::new(BigInt::one(), BigInt::one() << 1100usize) {
                return rational_to_f64(&((&r.lo + &r.hi) / rat(2)));
            }
            r.bisect();
        }
    }

    pub fn sign(&self) -> i8 {
        match compare_real(self, &RealAlgebraic::from_rational(Rational::zero())) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", approx_string(self.to_f64()))
    }
}

impl PartialEq for RealAlgebraic {
    fn eq(&self, other: &Self) -> bool {
        compare_real(self, other) == Ordering::Equal
    }
}

/// Decimal rendering with 12 significant digits.
pub fn approx_string(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-6..15).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 64;
    let scaled: BigRational = if shift >= 0 {
        r / Rational::from_integer(BigInt::one() << (shift as usize))
    } else {
        r * Rational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    let v = scaled.to_integer().to_f64().unwrap_or(0.0);
    v * 2f64.powi(shift as i32)
}

/// Sturm sequence of a squarefree polynomial.
pub fn sturm_sequence(p: &Polynomial) -> Vec<Polynomial> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        if seq[n - 1].degree() == 0 {
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]);
        // Positive rescaling keeps sign patterns and tames coefficient growth.
        let (c, prim) = r.content_primitive();
        if prim.is_zero() {
            break;
        }
        let s = if c.is_negative() { prim } else { -&prim };
        seq.push(s);
    }
    seq
}

fn variations(seq: &[Polynomial], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for s in seq {
        let v = s.sign_at(x);
        if v != 0 {
            if last != 0 && v != last {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// Number of distinct roots in the half-open interval `(a, b]`.
pub fn count_roots(seq: &[Polynomial], a: &Rational, b: &Rational) -> usize {
    variations(seq, a).saturating_sub(variations(seq, b))
}

/// Cauchy bound: every root has absolute value strictly less than the result.
pub fn root_bound(p: &Polynomial) -> Rational {
    let lc = p.leading().abs();
    let mut m = Rational::zero();
    for c in &p.coeffs()[..p.degree()] {
        let v = c.abs() / &lc;
        if v > m {
            m = v;
        }
    }
    (m + rat(1)).ceil() + rat(1)
}

/// Isolates all distinct real roots of `p`, in increasing order. Rational
/// roots found along the way are returned as exact values.
pub fn isolate_real_roots(p: &Polynomial) -> Vec<RealAlgebraic> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let f = p.squarefree_part();
    let seq = sturm_sequence(&f);
    let b = root_bound(&f);
    let mut out = Vec::new();
    isolate_in(&f, &seq, -b.clone(), b, &mut out);
    out
}

/// Isolates roots inside `(lo, hi)`, where neither endpoint is a root.
fn isolate_in(
    f: &Polynomial,
    seq: &[Polynomial],
    lo: Rational,
    hi: Rational,
    out: &mut Vec<RealAlgebraic>,
) {
    let n = count_roots(seq, &lo, &hi);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push(RealAlgebraic::from_parts(f.clone(), lo, hi));
        return;
    }
    let mid = (&lo + &hi) / rat(2);
    if f.sign_at(&mid) != 0 {
        isolate_in(f, seq, lo, mid.clone(), out);
        isolate_in(f, seq, mid, hi, out);
        return;
    }
    // The midpoint is a rational root; step away from it until no other root is close.
    let mut delta = (&hi - &lo) / rat(4);
    loop {
        let a = &mid - &delta;
        let b = &mid + &delta;
        if f.sign_at(&a) != 0 && f.sign_at(&b) != 0 && count_roots(seq, &a, &b) == 1 {
            isolate_in(f, seq, lo, a, out);
            out.push(RealAlgebraic::from_rational(mid.clone()));
            isolate_in(f, seq, b, hi, out);
            return;
        }
        delta /= rat(2);
    }
}

/// Whether `a` and `b` denote the same real number, decided by a common
/// factor having a root inside both isolating intervals.
fn equal_by_gcd(a: &RealAlgebraic, b: &RealAlgebraic) -> bool {
    if let Some(r) = a.as_rational() {
        return contains_as_root(b, r);
    }
    if let Some(r) = b.as_rational() {
        return contains_as_root(a, r);
    }
    let lo = if a.lo > b.lo { &a.lo } else { &b.lo };
    let hi = if a.hi < b.hi { &a.hi } else { &b.hi };
    if lo >= hi {
        return false;
    }
    let g = Polynomial::gcd(&a.poly, &b.poly);
    if g.degree() == 0 {
        return false;
    }
    let seq = sturm_sequence(&g);
    let mut n = count_roots(&seq, lo, hi);
    if g.sign_at(hi) == 0 {
        n = n.saturating_sub(1);
    }
    n > 0
}

fn contains_as_root(x: &RealAlgebraic, r: &Rational) -> bool {
    if x.is_exact() {
        return &x.lo == r;
    }
    &x.lo < r && r < &x.hi && x.poly.sign_at(r) == 0
}

/// Exact comparison of two real algebraic numbers.
pub fn compare_real(a: &RealAlgebraic, b: &RealAlgebraic) -> Ordering {
    let mut a = a.clone();
    let mut b = b.clone();
    let mut checked_equal = false;
    loop {
        if a.hi < b.lo || (a.hi == b.lo && !(a.is_exact() && b.is_exact())) {
            return Ordering::Less;
        }
        if b.hi < a.lo || (b.hi == a.lo && !(a.is_exact() && b.is_exact())) {
            return Ordering::Greater;
        }
        if a.is_exact() && b.is_exact() {
            return a.lo.cmp(&b.lo);
        }
        if !checked_equal {
            if equal_by_gcd(&a, &b) {
                return Ordering::Equal;
            }
            checked_equal = true;
        }
        if a.width() >= b.width() {
            a.bisect();
        } else {
            b.bisect();
        }
    }
}

/// Interval evaluation of `p` over `[lo, hi]`, returning an enclosure of the range.
pub fn eval_interval(p: &Polynomial, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    for c in p.coeffs().iter().rev() {
        let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mut mn = prods[0].clone();
        let mut mx = prods[0].clone();
        for v in &prods[1..] {
            if v < &mn {
                mn = v.clone();
            }
            if v > &mx {
                mx = v.clone();
            }
        }
        a = mn + c;
        b = mx + c;
    }
    (a, b)
}

/// Largest real root of `p`, if any.
pub fn max_real_root(p: &Polynomial) -> Option<RealAlgebraic> {
    isolate_real_roots(p).pop()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::poly::rat_frac;

    #[test]
    fn golden_ratio_square() {
        let p = Polynomial::from_ints(&[1, -3, 1]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 2);
        let x = roots[1].to_f64();
        assert!((x - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rational_roots_compare_equal() {
        // (t - 1)(t - 2)(t + 1/2)
        let p = &(&Polynomial::from_ints(&[-1, 1]) * &Polynomial::from_ints(&[-2, 1]))
            * &Polynomial::new(vec![rat_frac(1, 2), rat(1)]);
        let roots = isolate_real_roots(&p);
        let expected = [rat_frac(-1, 2), rat(1), rat(2)];
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip(expected) {
            let e = RealAlgebraic::from_rational(e);
            assert_eq!(compare_real(r, &e), Ordering::Equal);
        }
    }

    #[test]
    fn comparison_of_equal_numbers_with_different_polys() {
        // sqrt(2) as root of t^2 - 2 and of (t^2 - 2)(t - 5).
        let a = max_real_root(&Polynomial::from_ints(&[-2, 0, 1])).unwrap();
        let p = &Polynomial::from_ints(&[-2, 0, 1]) * &Polynomial::from_ints(&[-5, 1]);
        let roots = isolate_real_roots(&p);
        let b = roots[1].clone();
        assert_eq!(compare_real(&a, &b), Ordering::Equal);
        assert_eq!(compare_real(&a, &roots[2]), Ordering::Less);
        assert_eq!(compare_real(&roots[0], &a), Ordering::Less);
    }

    #[test]
    fn approx_rendering() {
        assert_eq!(approx_string(2.618033988749895), "2.61803398875");
        assert_eq!(approx_string(0.25), "0.25");
        assert_eq!(approx_string(3.0), "3");
    }
}
