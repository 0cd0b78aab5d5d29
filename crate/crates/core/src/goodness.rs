//! Goodness, Bernoulli-type and multiplicativity tests, and the quotient
//! condition witness.
//!
//! A measure is good when, for some `R`, every `lambda^R x_i` outside the class
//! lies in the lattice spanned by the class entries `x_alpha`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::factor::{prime_divisors, strip_common_factors};
use crate::exactmath::field::FieldElement;
use crate::exactmath::poly::{int_rat, Rational};
use crate::measure::ErgodicMeasure;
use crate::values::{member_s, LatticeGroup, MembershipVerdict, Orbit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// The support is the class itself.
    Simple,
    /// Integer test on `q` and `p` for rational `lambda`.
    Rational,
    /// Orbit test on the quotient of lattices.
    Lattice,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Simple => "simple",
            Branch::Rational => "rational",
            Branch::Lattice => "lattice",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodnessVerdict {
    pub good: bool,
    pub branch: Branch,
    /// `R` with `lambda^R x_i ∈ H(x_alpha)` for every vertex outside the class.
    pub exponent: Option<usize>,
    /// Rational branch: gcd of the class numerators.
    pub alpha_gcd: Option<BigInt>,
    /// Rational branch: that gcd with all prime factors of `lambda` removed.
    pub residual: Option<BigInt>,
    /// Lattice branch: index of the class lattice in the full lattice.
    pub quotient_index: Option<BigInt>,
    /// `(vertex, c)` with `lambda^R x_vertex = sum c_j x_alpha[j]`.
    pub expansions: Vec<(usize, Vec<BigInt>)>,
    /// Lattice branch failure: a vertex whose orbit cycles, with the cycle.
    pub failing_vertex: Option<usize>,
    pub orbit: Option<(Vec<Vec<Rational>>, usize)>,
}

impl GoodnessVerdict {
    fn base(branch: Branch) -> Self {
        GoodnessVerdict {
            good: false,
            branch,
            exponent: None,
            alpha_gcd: None,
            residual: None,
            quotient_index: None,
            expansions: Vec::new(),
            failing_vertex: None,
            orbit: None,
        }
    }
}

/// Decides goodness, using the integer test when `lambda` is rational.
pub fn is_good(mu: &ErgodicMeasure) -> Result<GoodnessVerdict> {
    if mu.non_alpha().is_empty() {
        let mut v = GoodnessVerdict::base(Branch::Simple);
        v.good = true;
        v.exponent = Some(0);
        return Ok(v);
    }
    if mu.is_rational() {
        is_good_rational(mu)
    } else {
        is_good_lattice(mu)
    }
}

fn alpha_lattice(mu: &ErgodicMeasure) -> Result<LatticeGroup> {
    LatticeGroup::new(mu.field(), &mu.alpha_vector(), mu.lambda())
}

fn expansions(
    mu: &ErgodicMeasure,
    lat: &LatticeGroup,
    r: usize,
) -> Result<Vec<(usize, Vec<BigInt>)>> {
    let lr = mu.lambda().pow(r as i64)?;
    let alpha = mu.alpha_vector();
    let mut out = Vec::new();
    for v in mu.non_alpha() {
        let y = &lr * &mu.x_of(v).unwrap();
        let c = lat.express(&y).ok_or_else(|| {
            Error::Internal(format!("lambda^{r} x_{v} is not in the class lattice"))
        })?;
        let mut check = mu.field().zero();
        for (a, x) in c.iter().zip(&alpha) {
            check = &check + &x.scale(&int_rat(a));
        }
        if check != y {
            return Err(Error::Internal("goodness certificate does not verify".into()));
        }
        out.push((v, c));
    }
    Ok(out)
}

/// Integer criterion: with `a = gcd(p_alpha)`, good iff `a` divides a power of `lambda`.
pub fn is_good_rational(mu: &ErgodicMeasure) -> Result<GoodnessVerdict> {
    let rf = mu
        .rational_form()
        .ok_or_else(|| Error::Precondition("measure is not rational".into()))?;
    let lambda = mu.lambda().as_rational().unwrap().to_integer();
    let a = mu
        .alpha_members()
        .iter()
        .map(|v| &rf.p[mu.support().binary_search(v).unwrap()])
        .fold(BigInt::zero(), |acc, p| acc.gcd(p));
    let residual = strip_common_factors(&a, &lambda);
    let mut v = GoodnessVerdict::base(Branch::Rational);
    v.alpha_gcd = Some(a.clone());
    v.residual = Some(residual.clone());
    if residual.is_one() {
        let mut r = 0usize;
        let mut pw = BigInt::one();
        while !(&pw % &a).is_zero() {
            pw *= &lambda;
            r += 1;
        }
        let lat = alpha_lattice(mu)?;
        v.good = true;
        v.exponent = Some(r);
        v.expansions = expansions(mu, &lat, r)?;
    }
    Ok(v)
}

/// Lattice criterion, valid for every field degree.
pub fn is_good_lattice(mu: &ErgodicMeasure) -> Result<GoodnessVerdict> {
    let mut v = GoodnessVerdict::base(Branch::Lattice);
    let full = mu.lattice()?;
    let lat = alpha_lattice(mu)?;
    let index = lat.covolume() / full.covolume();
    if !index.is_integer() {
        return Err(Error::Internal("class lattice is not a sublattice".into()));
    }
    v.quotient_index = Some(index.to_integer());
    let mut r = 0usize;
    for vert in mu.non_alpha() {
        let c = lat.coords(&mu.x_of(vert).unwrap());
        match lat.orbit(&c) {
            Orbit::Reached { steps } => r = r.max(steps),
            Orbit::Cycle {
                states,
                cycle_start,
            } => {
                v.failing_vertex = Some(vert);
                v.orbit = Some((states, cycle_start));
                return Ok(v);
            }
        }
    }
    v.good = true;
    v.exponent = Some(r);
    v.expansions = expansions(mu, &lat, r)?;
    Ok(v)
}

/// For a rational measure: every prime factor of `q` divides `lambda`.
fn primes_of_q_divide_lambda(mu: &ErgodicMeasure) -> Result<bool> {
    let rf = mu
        .rational_form()
        .ok_or_else(|| Error::Precondition("measure is not rational".into()))?;
    let lambda = mu.lambda().as_rational().unwrap().to_integer();
    Ok(strip_common_factors(&rf.q, &lambda).is_one())
}

/// Whether a good rational measure is of Bernoulli type.
pub fn bernoulli_type_rational(mu: &ErgodicMeasure) -> Result<bool> {
    if !is_good(mu)?.good {
        return Err(Error::Precondition("measure is not good".into()));
    }
    primes_of_q_divide_lambda(mu)
}

/// Whether `S(mu)` is closed under multiplication, for rational `lambda`.
pub fn multiplicative_s_rational(mu: &ErgodicMeasure) -> Result<bool> {
    primes_of_q_divide_lambda(mu)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientWitness {
    pub prime: BigInt,
    /// Primes dividing the denominators of `D = C^-1` and of the reduced vector.
    pub excluded: Vec<BigInt>,
    pub verdict: MembershipVerdict,
}

/// A prime `l` such that `1/l` is not a value of `mu`.
pub fn quotient_condition_witness(mu: &ErgodicMeasure) -> Result<QuotientWitness> {
    let cp = mu.field().companion_pair();
    let mut dens: Vec<BigInt> = cp.d_entries().map(|e| e.denom().clone()).collect();
    for x in mu.reduced_vector() {
        dens.push(x.denominator());
    }
    let mut excluded: Vec<BigInt> = Vec::new();
    for d in dens {
        if d.is_one() {
            continue;
        }
        for p in prime_divisors(&d)? {
            if !excluded.contains(&p) {
                excluded.push(p);
            }
        }
    }
    excluded.sort();
    let mut l = BigInt::from(2);
    while excluded.contains(&l) || !is_prime(&l) {
        l += 1;
    }
    let v = FieldElement::from_rational(mu.field(), Rational::new(BigInt::one(), l.clone()));
    let verdict = member_s(mu, &v)?;
    if verdict.member {
        return Err(Error::Internal(format!("1/{l} unexpectedly lies in S(mu)")));
    }
    Ok(QuotientWitness {
        prime: l,
        excluded,
        verdict,
    })
}

fn is_prime(n: &BigInt) -> bool {
    let mut d = BigInt::from(2);
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            return false;
        }
        d += 1;
    }
    n > &BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Diagram;
    use crate::measure::build_measure;

    fn example3(n: u64) -> Diagram {
        Diagram::from_u64(None, &[vec![2, 0, 0], vec![1, n, 1], vec![1, 1, n]]).unwrap()
    }

    #[test]
    fn example_three_goodness_depends_on_n() {
        // N = 4: x = (1/4, 3/8, 3/8), lambda = 5, gcd(3, 3) = 3 shares nothing with 5.
        let mu = build_measure(&example3(4), 1).unwrap();
        let v = is_good(&mu).unwrap();
        assert!(!v.good);
        assert_eq!(v.residual, Some(BigInt::from(3)));
        assert!(!is_good_lattice(&mu).unwrap().good);
        // N = 3: x = (1/3, 1/3, 1/3), lambda = 4, gcd 1.
        let mu = build_measure(&example3(3), 1).unwrap();
        assert!(is_good(&mu).unwrap().good);
        assert!(is_good_lattice(&mu).unwrap().good);
        // N = 5: x = (1/5, 2/5, 2/5), lambda = 6, gcd 2 divides 6.
        let mu = build_measure(&example3(5), 1).unwrap();
        let v = is_good(&mu).unwrap();
        assert!(v.good);
        assert_eq!(v.exponent, Some(1));
    }

    #[test]
    fn witness_is_not_a_value() {
        let mu = build_measure(&example3(4), 1).unwrap();
        let w = quotient_condition_witness(&mu).unwrap();
        assert_eq!(w.prime, BigInt::from(3));
        assert_eq!(w.excluded, vec![BigInt::from(2), BigInt::from(5)]);
    }
}
