//! Real number fields `Q(lambda)` with a chosen real embedding.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::factor::{is_irreducible, DEFAULT_DEGREE_BOUND};
use super::matrix::{det_rat, RatMatrix};
use super::poly::{fmt_rational, int_rat, rat, render_poly, Polynomial, Rational};
use super::roots::{approx_string, eval_interval, isolate_real_roots, RealAlgebraic};
use crate::error::{Error, Result};

/// `Q(lambda)` where `lambda` is a fixed real root of an irreducible monic
/// integral polynomial.
#[derive(Debug)]
pub struct NumberField {
    minpoly: Polynomial,
    root: RealAlgebraic,
    root_index: usize,
}

pub type FieldRef = Arc<NumberField>;

impl NumberField {
    /// Builds the field; `root` must be a root of `minpoly`.
    pub fn new(minpoly: Polynomial, root: &RealAlgebraic) -> Result<FieldRef> {
        if !minpoly.is_monic_integer() || minpoly.degree() == 0 {
            return Err(Error::Internal(format!(
                "minimal polynomial {minpoly} is not monic integral"
            )));
        }
        if !is_irreducible(&minpoly, DEFAULT_DEGREE_BOUND.max(minpoly.degree()))? {
            return Err(Error::Internal(format!("{minpoly} is reducible")));
        }
        let roots = isolate_real_roots(&minpoly);
        let root_index = roots
            .iter()
            .position(|r| r == root)
            .ok_or_else(|| Error::Internal(format!("value is not a root of {minpoly}")))?;
        let mut tight = roots[root_index].clone();
        tight.refine_to(&Rational::new(BigInt::one(), BigInt::one() << 64usize));
        Ok(Arc::new(NumberField {
            minpoly,
            root: tight,
            root_index,
        }))
    }

    /// `Q` with distinguished element `lambda = r`.
    pub fn rational(r: &Rational) -> FieldRef {
        Arc::new(NumberField {
            minpoly: Polynomial::linear_root(r).monic(),
            root: RealAlgebraic::from_rational(r.clone()),
            root_index: 0,
        })
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    pub fn minpoly(&self) -> &Polynomial {
        &self.minpoly
    }

    pub fn root(&self) -> &RealAlgebraic {
        &self.root
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    pub fn same_as(&self, other: &NumberField) -> bool {
        self.minpoly == other.minpoly && self.root_index == other.root_index
    }

    /// Value of `lambda` when the field is `Q`.
    pub fn rational_generator(&self) -> Option<Rational> {
        if self.degree() == 1 {
            Some(-self.minpoly.coeff(0))
        } else {
            None
        }
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement::from_rational(self, Rational::zero())
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        FieldElement::from_rational(self, rat(1))
    }

    /// The generator `lambda`.
    pub fn generator(self: &Arc<Self>) -> FieldElement {
        match self.rational_generator() {
            Some(r) => FieldElement::from_rational(self, r),
            None => {
                let mut c = vec![Rational::zero(); self.degree()];
                c[1] = rat(1);
                FieldElement::new(self, c)
            }
        }
    }

    pub fn companion_pair(&self) -> CompanionPair {
        CompanionPair::new(&self.minpoly)
    }

    /// Display of the minimal polynomial in `t`.
    pub fn describe(&self) -> String {
        self.minpoly.to_string()
    }
}

/// An element `sum a_i lambda^i` with `deg < k`.
#[derive(Clone)]
pub struct FieldElement {
    field: FieldRef,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl FieldElement {
    /// Coefficients in the power basis; padded or reduced modulo the minimal polynomial.
    pub fn new(field: &FieldRef, coeffs: Vec<Rational>) -> Self {
        let k = field.degree();
        if coeffs.len() <= k {
            let mut c = coeffs;
            c.resize(k, Rational::zero());
            FieldElement {
                field: field.clone(),
                coeffs: c,
            }
        } else {
            Self::from_poly(field, &Polynomial::new(coeffs))
        }
    }

    pub fn from_poly(field: &FieldRef, p: &Polynomial) -> Self {
        let r = if field.degree() == 1 {
            Polynomial::constant(p.eval(&field.rational_generator().unwrap()))
        } else {
            p.rem(field.minpoly())
        };
        let mut c = r.coeffs().to_vec();
        c.resize(field.degree(), Rational::zero());
        FieldElement {
            field: field.clone(),
            coeffs: c,
        }
    }

    pub fn from_rational(field: &FieldRef, r: Rational) -> Self {
        let mut c = vec![Rational::zero(); field.degree()];
        c[0] = r;
        FieldElement {
            field: field.clone(),
            coeffs: c,
        }
    }

    pub fn from_int(field: &FieldRef, n: i64) -> Self {
        Self::from_rational(field, rat(n))
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_field(&self, other: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.same_as(&other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!(
                "Q[t]/({}) vs Q[t]/({})",
                self.field.minpoly, other.field.minpoly
            )))
        }
    }

    pub fn try_add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check_field(o)?;
        Ok(self.add_unchecked(o))
    }

    pub fn try_sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check_field(o)?;
        Ok(self.sub_unchecked(o))
    }

    pub fn try_mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check_field(o)?;
        Ok(self.mul_unchecked(o))
    }

    pub fn try_div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check_field(o)?;
        Ok(self.mul_unchecked(&o.inv()?))
    }

    fn add_unchecked(&self, o: &FieldElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub_unchecked(&self, o: &FieldElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    fn mul_unchecked(&self, o: &FieldElement) -> FieldElement {
        if self.field.degree() == 1 {
            return FieldElement {
                field: self.field.clone(),
                coeffs: vec![&self.coeffs[0] * &o.coeffs[0]],
            };
        }
        Self::from_poly(&self.field, &(&self.to_poly() * &o.to_poly()))
    }

    pub fn scale(&self, r: &Rational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a * r).collect(),
        }
    }

    pub fn neg(&self) -> FieldElement {
        self.scale(&rat(-1))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.field.degree() == 1 {
            return Ok(FieldElement::from_rational(
                &self.field,
                rat(1) / &self.coeffs[0],
            ));
        }
        // s * a + t * m = gcd, which is a non-zero constant since m is irreducible.
        let (mut r0, mut r1) = (self.field.minpoly.clone(), self.to_poly());
        let (mut s0, mut s1) = (Polynomial::zero(), Polynomial::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        debug_assert_eq!(r0.degree(), 0);
        let c = rat(1) / r0.coeff(0);
        Ok(Self::from_poly(&self.field, &s0.scale(&c)))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = FieldElement::from_int(&self.field, 1);
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul_unchecked(&b);
            }
        }
        Ok(acc)
    }

    /// Sign of the real value under the field's embedding.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return if r.is_positive() { 1 } else { -1 };
        }
        let p = self.to_poly();
        let mut root = self.field.root.clone();
        loop {
            if let Some(r) = root.as_rational() {
                let v = p.eval(r);
                return if v.is_positive() { 1 } else { -1 };
            }
            let (lo, hi) = eval_interval(&p, root.lo(), root.hi());
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            root.bisect();
        }
    }

    pub fn cmp_real(&self, o: &FieldElement) -> Ordering {
        match self.sub_unchecked(o).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Matrix of multiplication by this element in the power basis (column j = self * lambda^j).
    pub fn mul_matrix(&self) -> RatMatrix {
        let k = self.field.degree();
        let mut cols = Vec::with_capacity(k);
        let mut cur = self.clone();
        let lam = self.field.generator();
        for _ in 0..k {
            cols.push(cur.coeffs.clone());
            cur = cur.mul_unchecked(&lam);
        }
        (0..k)
            .map(|i| (0..k).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    pub fn norm(&self) -> Rational {
        det_rat(&self.mul_matrix())
    }

    /// Floor of the real value.
    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return r.floor().to_integer();
        }
        let p = self.to_poly();
        let mut root = self.field.root.clone();
        loop {
            let (lo, hi) = match root.as_rational() {
                Some(r) => {
                    let v = p.eval(r);
                    (v.clone(), v)
                }
                None => eval_interval(&p, root.lo(), root.hi()),
            };
            let fl = lo.floor();
            if hi < &fl + rat(1) {
                return fl.to_integer();
            }
            root.bisect();
        }
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(r) = self.as_rational() {
            return super::roots::rational_to_f64(r);
        }
        let x = self.field.root.to_f64();
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + super::roots::rational_to_f64(c);
        }
        if acc.abs() < 1e-9 {
            // Cancellation: fall back to a tighter interval evaluation.
            let mut root = self.field.root.clone();
            root.refine_to(&Rational::new(BigInt::one(), BigInt::one() << 200usize));
            let (lo, hi) = eval_interval(&self.to_poly(), root.lo(), root.hi());
            return super::roots::rational_to_f64(&((lo + hi) / rat(2)));
        }
        acc
    }

    pub fn approx(&self) -> String {
        approx_string(self.to_f64())
    }

    /// Coefficients rendered as strings, low degree first.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(fmt_rational).collect()
    }

    /// Common denominator of the coefficients.
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Image under the embedding sending `lambda` to `theta` (in the target field).
    pub fn map_to(&self, theta: &FieldElement) -> FieldElement {
        let mut acc = theta.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_unchecked(theta);
            acc.coeffs[0] += c;
        }
        acc
    }

    pub fn to_int_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| if c.is_integer() { Some(c.to_integer()) } else { None })
            .collect()
    }

    pub fn from_int_coeffs(field: &FieldRef, c: &[BigInt]) -> Self {
        Self::new(field, c.iter().map(int_rat).collect())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_poly(&self.to_poly(), "l"))
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl std::ops::$tr for &FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                debug_assert!(self.check_field(o).is_ok(), "field mismatch");
                self.$imp(o)
            }
        }
    };
}
forward_op!(Add, add, add_unchecked);
forward_op!(Sub, sub, sub_unchecked);
forward_op!(Mul, mul, mul_unchecked);

/// Exact arithmetic on two elements by operator name.
pub fn nf_arith(a: &FieldElement, b: &FieldElement, op: char) -> Result<FieldElement> {
    match op {
        '+' => a.try_add(b),
        '-' => a.try_sub(b),
        '*' => a.try_mul(b),
        '/' => a.try_div(b),
        _ => Err(Error::Expr(format!("unknown operator {op:?}"))),
    }
}

pub fn nf_sign(a: &FieldElement) -> i8 {
    a.sign()
}

/// Companion matrix `C` of multiplication by `lambda` and its inverse `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompanionPair {
    pub c: RatMatrix,
    pub d: RatMatrix,
}

impl CompanionPair {
    pub fn new(minpoly: &Polynomial) -> Self {
        let k = minpoly.degree();
        let m: Vec<Rational> = (0..k).map(|i| minpoly.coeff(i)).collect();
        let mut c = vec![vec![Rational::zero(); k]; k];
        for i in 0..k {
            if i + 1 < k {
                c[i + 1][i] = rat(1);
            }
            c[i][k - 1] = -m[i].clone();
        }
        let mut d = vec![vec![Rational::zero(); k]; k];
        let m0 = m[0].clone();
        for i in 0..k {
            let v = if i + 1 < k { &m[i + 1] / &m0 } else { rat(1) / &m0 };
            d[i][0] = -v;
            if i + 1 < k {
                d[i][i + 1] = rat(1);
            }
        }
        CompanionPair { c, d }
    }

    /// Entries of `D` as rationals, row-major.
    pub fn d_entries(&self) -> impl Iterator<Item = &Rational> {
        self.d.iter().flatten()
    }
}
