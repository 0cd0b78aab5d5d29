//! Locating roots of rational polynomials inside a number field, used to
//! embed one field into another.

use super::factor::{factor_over_rationals, DEFAULT_DEGREE_BOUND};
use super::field::{FieldElement, FieldRef};
use super::matrix::interpolate;
use super::poly::{rat, Polynomial, Rational};
use super::roots::RealAlgebraic;
use crate::error::Result;

/// Polynomial with coefficients in a number field, low degree first.
#[derive(Clone, Debug)]
struct KPoly {
    c: Vec<FieldElement>,
}

impl KPoly {
    fn trim(mut self) -> Self {
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        self
    }

    fn from_rational(field: &FieldRef, p: &Polynomial) -> Self {
        KPoly {
            c: p
                .coeffs()
                .iter()
                .map(|a| FieldElement::from_rational(field, a.clone()))
                .collect(),
        }
        .trim()
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn rem(&self, d: &KPoly) -> KPoly {
        let mut r = self.c.clone();
        let dd = d.degree();
        let inv = d.c[dd].inv().expect("non-zero leading coefficient");
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let f = &r[top] * &inv;
            if !f.is_zero() {
                for (j, dc) in d.c.iter().enumerate() {
                    let idx = top - dd + j;
                    r[idx] = &r[idx] - &(&f * dc);
                }
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        KPoly { c: r }.trim()
    }

    fn monic(&self) -> KPoly {
        let inv = self.c.last().unwrap().inv().expect("non-zero");
        KPoly {
            c: self.c.iter().map(|x| x * &inv).collect(),
        }
    }

    fn gcd(a: &KPoly, b: &KPoly) -> KPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }
}

/// `g(t - s*lambda)` as a polynomial over the field.
fn shifted(g: &Polynomial, field: &FieldRef, s: i64) -> KPoly {
    let shift = field.generator().scale(&rat(-s));
    let mut acc: Vec<FieldElement> = Vec::new();
    for a in g.coeffs().iter().rev() {
        // acc = acc * (t + shift) + a
        let mut next = vec![field.zero(); acc.len() + 1];
        for (i, x) in acc.iter().enumerate() {
            next[i + 1] = &next[i + 1] + x;
            next[i] = &next[i] + &(x * &shift);
        }
        next[0] = &next[0] + &FieldElement::from_rational(field, a.clone());
        acc = next;
    }
    KPoly { c: acc }.trim()
}

/// Norm from `K[t]` down to `Q[t]` of `g(t - s*lambda)`, by interpolation.
fn shifted_norm(g: &Polynomial, field: &FieldRef, s: i64) -> Polynomial {
    let k = field.degree();
    let deg = k * g.degree();
    let lam = field.generator();
    let xs: Vec<Rational> = (0..=deg).map(|i| rat(i as i64)).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|t0| {
            let arg = &FieldElement::from_rational(field, t0.clone()) - &lam.scale(&rat(s));
            let mut v = field.zero();
            for a in g.coeffs().iter().rev() {
                v = &(&v * &arg) + &FieldElement::from_rational(field, a.clone());
            }
            v.norm()
        })
        .collect();
    interpolate(&xs, &ys)
}

/// Finds the root of `g` in `field` whose real value equals `target`, if any.
pub fn find_root_in_field(
    g: &Polynomial,
    target: &RealAlgebraic,
    field: &FieldRef,
) -> Result<Option<FieldElement>> {
    let check = |theta: FieldElement| -> Option<FieldElement> {
        let mut v = field.zero();
        for a in g.coeffs().iter().rev() {
            v = &(&v * &theta) + &FieldElement::from_rational(field, a.clone());
        }
        if !v.is_zero() {
            return None;
        }
        if same_real(&theta, target) {
            Some(theta)
        } else {
            None
        }
    };
    if g.degree() == 1 {
        let r = -g.coeff(0) / g.coeff(1);
        return Ok(check(FieldElement::from_rational(field, r)));
    }
    if field.degree() == 1 {
        return Ok(match target.as_rational() {
            Some(r) => check(FieldElement::from_rational(field, r.clone())),
            None => None,
        });
    }
    let g = g.squarefree_part();
    for s in 0..64i64 {
        let n = shifted_norm(&g, field, s);
        if !n.is_squarefree() {
            continue;
        }
        let gs = shifted(&g, field, s);
        let fac = factor_over_rationals(&n, DEFAULT_DEGREE_BOUND.max(n.degree()))?;
        for (p, _) in &fac.factors {
            let h = KPoly::gcd(&gs, &KPoly::from_rational(field, p));
            if h.degree() == 1 {
                // h = t - c with c = theta + s*lambda.
                let c = h.c[0].neg();
                let theta = &c - &field.generator().scale(&rat(s));
                if let Some(t) = check(theta) {
                    return Ok(Some(t));
                }
            }
        }
        return Ok(None);
    }
    Ok(None)
}

fn same_real(x: &FieldElement, target: &RealAlgebraic) -> bool {
    if let Some(r) = target.as_rational() {
        return x.as_rational() == Some(r);
    }
    let lo = FieldElement::from_rational(x.field(), target.lo().clone());
    let hi = FieldElement::from_rational(x.field(), target.hi().clone());
    x.cmp_real(&lo) == std::cmp::Ordering::Greater && x.cmp_real(&hi) == std::cmp::Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::field::NumberField;
    use crate::exactmath::roots::{isolate_real_roots, max_real_root};

    #[test]
    fn embeds_power_of_generator() {
        let p = Polynomial::from_ints(&[-1, -1, 1]); // golden ratio
        let k = NumberField::new(p.clone(), &max_real_root(&p).unwrap()).unwrap();
        // phi^2 = phi + 1 is the larger root of t^2 - 3t + 1.
        let g = Polynomial::from_ints(&[1, -3, 1]);
        let roots = isolate_real_roots(&g);
        let theta = find_root_in_field(&g, &roots[1], &k).unwrap().unwrap();
        assert_eq!(theta.coeffs(), &[rat(1), rat(1)]);
        let other = find_root_in_field(&g, &roots[0], &k).unwrap().unwrap();
        assert_eq!(other.coeffs(), &[rat(2), rat(-1)]);
        // sqrt 2 is not in Q(sqrt 5).
        let h = Polynomial::from_ints(&[-2, 0, 1]);
        let r = max_real_root(&h).unwrap();
        assert!(find_root_in_field(&h, &r, &k).unwrap().is_none());
    }
}
