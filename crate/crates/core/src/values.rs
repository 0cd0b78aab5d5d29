//! The value set `S(mu) = G ∩ [0, 1]`, where `G` is the union of
//! `lambda^-N H` over `N >= 0` and `H` is the integer span of the reduced
//! vector.
//!
//! `H` is a full-rank lattice in the field, stored by a Hermite basis in
//! power-basis coordinates. Multiplication by `lambda` preserves `H`, so it
//! acts on lattice coordinates by an integral matrix `M`. An element `v` with
//! lattice coordinates `c` lies in `G` exactly when `M^N c` is integral for
//! some `N`; the fractional parts of `M^N c` run through a finite set, so the
//! search either reaches zero or revisits a state, which certifies
//! non-membership.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::embed::find_root_in_field;
use crate::exactmath::expr::parse_poly_expr;
use crate::exactmath::field::{FieldElement, FieldRef, NumberField};
use crate::exactmath::hnf::hnf;
use crate::exactmath::matrix::IntMatrix;
use crate::exactmath::poly::{int_rat, Rational};
use crate::measure::ErgodicMeasure;

/// Default bound on the number of tuples visited by level enumeration.
pub const DEFAULT_ENUM_BUDGET: u64 = 1_000_000;

/// A lattice `H` with a multiplier `m` satisfying `m H ⊆ H`; it represents
/// the group `∪ m^-N H`.
#[derive(Clone, Debug)]
pub struct LatticeGroup {
    field: FieldRef,
    den: BigInt,
    basis: IntMatrix,
    transform: IntMatrix,
    generators: Vec<FieldElement>,
    multiplier: FieldElement,
    mul: IntMatrix,
}

/// Outcome of iterating the multiplier on lattice coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orbit {
    /// `M^steps c` is integral.
    Reached { steps: usize },
    /// Fractional parts `states[0..]` with `states[last] == states[cycle_start]` never zero.
    Cycle {
        states: Vec<Vec<Rational>>,
        cycle_start: usize,
    },
}

impl LatticeGroup {
    pub fn new(
        field: &FieldRef,
        generators: &[FieldElement],
        multiplier: &FieldElement,
    ) -> Result<Self> {
        let k = field.degree();
        let den = generators
            .iter()
            .fold(BigInt::one(), |acc, g| acc.lcm(&g.denominator()));
        let rows: IntMatrix = generators
            .iter()
            .map(|g| {
                g.coeffs()
                    .iter()
                    .map(|c| (c * int_rat(&den)).to_integer())
                    .collect()
            })
            .collect();
        let h = hnf(&rows);
        if h.rank != k {
            return Err(Error::Internal(format!(
                "generators span rank {} instead of {k}",
                h.rank
            )));
        }
        let mut lg = LatticeGroup {
            field: field.clone(),
            den,
            basis: h.h[..k].to_vec(),
            transform: h.u[..k].to_vec(),
            generators: generators.to_vec(),
            multiplier: multiplier.clone(),
            mul: Vec::new(),
        };
        let mut cols = Vec::with_capacity(k);
        for j in 0..k {
            let b = lg.basis_element(j);
            let c = lg.coords(&(multiplier * &b));
            let ints: Option<Vec<BigInt>> = c
                .iter()
                .map(|x| if x.is_integer() { Some(x.to_integer()) } else { None })
                .collect();
            cols.push(ints.ok_or_else(|| {
                Error::Internal("lattice is not invariant under the multiplier".into())
            })?);
        }
        lg.mul = (0..k)
            .map(|i| (0..k).map(|j| cols[j][i].clone()).collect())
            .collect();
        Ok(lg)
    }

    /// The group `(1/q) Z[1/lambda]` inside `Q`.
    pub fn rational_reference(q: &BigInt, lambda: &BigInt) -> Result<Self> {
        let field = NumberField::rational(&int_rat(lambda));
        let g = FieldElement::from_rational(&field, Rational::new(BigInt::one(), q.clone()));
        LatticeGroup::new(&field, &[g], &field.generator())
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    pub fn multiplier(&self) -> &FieldElement {
        &self.multiplier
    }

    /// Common denominator of the basis.
    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// Hermite basis rows (to be divided by `den`).
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Integral matrix of the multiplier on lattice coordinates.
    pub fn mul_matrix(&self) -> &IntMatrix {
        &self.mul
    }

    /// Canonical form: reduced denominator and Hermite basis.
    pub fn canonical(&self) -> (BigInt, IntMatrix) {
        let mut g = self.den.clone();
        for r in &self.basis {
            for v in r {
                g = g.gcd(v);
            }
        }
        (
            &self.den / &g,
            self.basis
                .iter()
                .map(|r| r.iter().map(|v| v / &g).collect())
                .collect(),
        )
    }

    fn basis_element(&self, j: usize) -> FieldElement {
        FieldElement::new(
            &self.field,
            self.basis[j]
                .iter()
                .map(|v| Rational::new(v.clone(), self.den.clone()))
                .collect(),
        )
    }

    /// Covolume in power-basis coordinates.
    pub fn covolume(&self) -> Rational {
        let k = self.basis.len();
        let mut d = Rational::one();
        for i in 0..k {
            d *= Rational::new(self.basis[i][i].clone(), self.den.clone());
        }
        d
    }

    /// Coordinates of `v` with respect to the Hermite basis.
    pub fn coords(&self, v: &FieldElement) -> Vec<Rational> {
        let k = self.basis.len();
        let t: Vec<Rational> = v.coeffs().iter().map(|c| c * int_rat(&self.den)).collect();
        let mut c: Vec<Rational> = Vec::with_capacity(k);
        for col in 0..k {
            let mut acc = t[col].clone();
            for (j, cj) in c.iter().enumerate() {
                if !self.basis[j][col].is_zero() {
                    acc -= cj * int_rat(&self.basis[j][col]);
                }
            }
            c.push(acc / int_rat(&self.basis[col][col]));
        }
        c
    }

    pub fn contains(&self, v: &FieldElement) -> bool {
        self.coords(v).iter().all(|x| x.is_integer())
    }

    /// Integer coefficients `a` with `v = sum a_i generators[i]`, if `v` lies in the lattice.
    pub fn express(&self, v: &FieldElement) -> Option<Vec<BigInt>> {
        let c = self.coords(v);
        if !c.iter().all(|x| x.is_integer()) {
            return None;
        }
        let r = self.generators.len();
        let mut out = vec![BigInt::zero(); r];
        for (j, cj) in c.iter().enumerate() {
            let cj = cj.to_integer();
            if cj.is_zero() {
                continue;
            }
            for i in 0..r {
                if !self.transform[j][i].is_zero() {
                    out[i] += &cj * &self.transform[j][i];
                }
            }
        }
        Some(out)
    }

    /// Orbit of the fractional parts of `M^N c`.
    pub fn orbit(&self, c: &[Rational]) -> Orbit {
        let frac = |v: &[Rational]| -> Vec<Rational> { v.iter().map(|x| x - x.floor()).collect() };
        let mut state = frac(c);
        let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
        let mut states = Vec::new();
        loop {
            if state.iter().all(|x| x.is_zero()) {
                return Orbit::Reached {
                    steps: states.len(),
                };
            }
            if let Some(&i) = seen.get(&state) {
                states.push(state);
                return Orbit::Cycle {
                    states,
                    cycle_start: i,
                };
            }
            seen.insert(state.clone(), states.len());
            let next: Vec<Rational> = self
                .mul
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&state)
                        .filter(|(a, _)| !a.is_zero())
                        .fold(Rational::zero(), |acc, (a, s)| acc + s * int_rat(a))
                })
                .collect();
            states.push(state);
            state = frac(&next);
        }
    }

    /// Membership in the group `∪ m^-N H`, without any range restriction.
    pub fn group_contains(&self, v: &FieldElement) -> Result<MembershipVerdict> {
        check_same_field(&self.field, v.field())?;
        match self.orbit(&self.coords(v)) {
            Orbit::Reached { steps } => {
                let scaled = &self.multiplier.pow(steps as i64)? * v;
                let coefficients = self.express(&scaled).ok_or_else(|| {
                    Error::Internal("orbit reached zero but element is not in the lattice".into())
                })?;
                let mut check = self.field.zero();
                for (a, g) in coefficients.iter().zip(&self.generators) {
                    check = &check + &g.scale(&int_rat(a));
                }
                if check != scaled {
                    return Err(Error::Internal("expansion certificate does not verify".into()));
                }
                Ok(MembershipVerdict {
                    member: true,
                    exponent: Some(steps),
                    certificate: Certificate::Expansion {
                        exponent: steps,
                        coefficients,
                    },
                })
            }
            Orbit::Cycle {
                states,
                cycle_start,
            } => Ok(MembershipVerdict {
                member: false,
                exponent: None,
                certificate: Certificate::Orbit {
                    states,
                    cycle_start,
                },
            }),
        }
    }
}

fn check_same_field(a: &FieldRef, b: &FieldRef) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::FieldMismatch(format!(
            "element of Q[t]/({}) tested against Q[t]/({})",
            b.minpoly(),
            a.minpoly()
        )))
    }
}

/// Evidence attached to a membership verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The value is negative or exceeds 1.
    OutOfRange { above_one: bool },
    /// `multiplier^exponent * v = sum coefficients[i] * generators[i]`.
    Expansion {
        exponent: usize,
        coefficients: Vec<BigInt>,
    },
    /// Fractional lattice coordinates cycle without reaching zero.
    Orbit {
        states: Vec<Vec<Rational>>,
        cycle_start: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipVerdict {
    pub member: bool,
    /// Smallest `N` with `lambda^N v ∈ H`.
    pub exponent: Option<usize>,
    pub certificate: Certificate,
}

/// Decides whether `v ∈ S(mu)`.
pub fn member_s(mu: &ErgodicMeasure, v: &FieldElement) -> Result<MembershipVerdict> {
    check_same_field(mu.field(), v.field())?;
    let below = v.sign() < 0;
    let above = (v - &mu.field().one()).sign() > 0;
    if below || above {
        return Ok(MembershipVerdict {
            member: false,
            exponent: None,
            certificate: Certificate::OutOfRange { above_one: above },
        });
    }
    mu.lattice()?.group_contains(v)
}

/// Parses a value for membership queries against `mu`.
///
/// Rational input is embedded into any field; an expression in `l` against a
/// rational measure is a field mismatch.
pub fn parse_value(mu: &ErgodicMeasure, text: &str) -> Result<FieldElement> {
    let p = parse_poly_expr(text)?;
    if mu.field().degree() == 1 && p.degree() >= 1 {
        return Err(Error::FieldMismatch(format!(
            "value {text:?} involves l, but the measure's field is Q"
        )));
    }
    Ok(FieldElement::from_poly(mu.field(), &p))
}

/// All distinct measures of clopen sets determined by level `n`, sorted increasingly.
pub fn enumerate_level_values(
    mu: &ErgodicMeasure,
    n: usize,
    budget: u64,
) -> Result<Vec<FieldElement>> {
    let heights = mu.diagram().heights(n)?;
    let support = mu.support();
    let h: Vec<BigUint> = support.iter().map(|&v| heights[v].clone()).collect();
    let product: BigUint = h.iter().map(|x| x + 1u32).product();
    if product > BigUint::from(budget) {
        return Err(Error::EnumerationTooLarge { product, budget });
    }
    let h: Vec<u64> = h.iter().map(|x| x.try_into().expect("bounded by budget")).collect();
    let scale = mu.lambda().pow(-(n as i64 - 1))?;
    let y: Vec<FieldElement> = mu.reduced_vector().iter().map(|x| x * &scale).collect();
    let mut digits = vec![0u64; h.len()];
    let mut sum = mu.field().zero();
    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut out = Vec::new();
    loop {
        if seen.insert(sum.coeffs().to_vec()) {
            out.push(sum.clone());
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                sort_real(&mut out);
                return Ok(out);
            }
            if digits[i] < h[i] {
                digits[i] += 1;
                sum = &sum + &y[i];
                break;
            }
            sum = &sum - &y[i].scale(&Rational::from_integer(BigInt::from(digits[i])));
            digits[i] = 0;
            i += 1;
        }
    }
}

fn sort_real(v: &mut [FieldElement]) {
    if v.first().is_some_and(|e| e.field().degree() == 1) {
        v.sort_by(|a, b| a.coeffs()[0].cmp(&b.coeffs()[0]));
    } else {
        v.sort_by(|a, b| a.cmp_real(b));
    }
}

/// Result of comparing two value groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupEquality {
    pub equal: bool,
    pub reason: String,
}

/// Whether two groups coincide as subsets of the reals.
pub fn groups_equal(g1: &LatticeGroup, g2: &LatticeGroup) -> Result<GroupEquality> {
    let k1 = g1.field();
    let k2 = g2.field();
    let mapped = if k1.same_as(k2) {
        g2.clone()
    } else {
        if k1.degree() != k2.degree() {
            return Ok(GroupEquality {
                equal: false,
                reason: format!(
                    "value fields have degrees {} and {}",
                    k1.degree(),
                    k2.degree()
                ),
            });
        }
        let Some(theta) = find_root_in_field(k2.minpoly(), k2.root(), k1)? else {
            return Ok(GroupEquality {
                equal: false,
                reason: "the groups span different real fields".into(),
            });
        };
        let gens: Vec<FieldElement> = g2.generators().iter().map(|g| g.map_to(&theta)).collect();
        LatticeGroup::new(k1, &gens, &g2.multiplier().map_to(&theta))?
    };
    // G1 = G2 iff each lattice lies in the other group and each group is
    // stable under the other multiplier's inverse.
    let checks: [(&LatticeGroup, &LatticeGroup, &str, &str); 2] =
        [(g1, &mapped, "first", "second"), (&mapped, g1, "second", "first")];
    for (a, b, an, bn) in checks {
        for (i, g) in a.generators().iter().enumerate() {
            if !b.group_contains(g)?.member {
                return Ok(GroupEquality {
                    equal: false,
                    reason: format!("generator {i} of the {an} group is not in the {bn}"),
                });
            }
        }
        let inv = a.multiplier().inv()?;
        for (i, g) in b.generators().iter().enumerate() {
            if !b.group_contains(&(g * &inv))?.member {
                return Ok(GroupEquality {
                    equal: false,
                    reason: format!(
                        "the {bn} group is not closed under division by the {an} multiplier (generator {i})"
                    ),
                });
            }
        }
    }
    Ok(GroupEquality {
        equal: true,
        reason: "each lattice lies in the other group and both are closed under both multipliers".into(),
    })
}

/// Whether `S(mu1) = S(mu2)`.
pub fn group_equal(mu1: &ErgodicMeasure, mu2: &ErgodicMeasure) -> Result<GroupEquality> {
    groups_equal(mu1.lattice()?, mu2.lattice()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Diagram;
    use crate::exactmath::expr::parse_element;
    use crate::measure::build_measure;

    fn example1() -> Diagram {
        Diagram::from_u64(None, &[vec![1, 1, 0], vec![1, 2, 0], vec![0, 1, 3]]).unwrap()
    }

    #[test]
    fn rational_membership() {
        let mu = build_measure(&example1(), 1).unwrap();
        let f = mu.field().clone();
        let yes = member_s(&mu, &parse_element(&f, "5/36").unwrap()).unwrap();
        assert!(yes.member);
        assert_eq!(yes.exponent, Some(2));
        let no = member_s(&mu, &parse_element(&f, "1/5").unwrap()).unwrap();
        assert!(!no.member);
        let out = member_s(&mu, &parse_element(&f, "3/2").unwrap()).unwrap();
        assert_eq!(out.certificate, Certificate::OutOfRange { above_one: true });
    }

    #[test]
    fn irrational_membership() {
        let mu = build_measure(&example1(), 0).unwrap();
        let f = mu.field().clone();
        // H is all of Z[l] here, so every element of [0, 1] in Z[l, 1/l] is a value.
        let v = parse_element(&f, "3 - l").unwrap();
        assert!(member_s(&mu, &v).unwrap().member);
        let w = parse_element(&f, "1/2").unwrap();
        assert!(!member_s(&mu, &w).unwrap().member);
    }

    #[test]
    fn enumeration_counts() {
        let mu = build_measure(&example1(), 1).unwrap();
        let vals = enumerate_level_values(&mu, 1, 100).unwrap();
        // level 1: sums of subsets of {1/4, 1/2, 1/4}
        let strs: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
        assert_eq!(strs, vec!["0", "1/4", "1/2", "3/4", "1"]);
        assert!(matches!(
            enumerate_level_values(&mu, 4, 1000),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
