//! JSON serialization of diagrams, measures, verdicts and constructions.
//!
//! Exact data is always present; decimal approximations are for display.
//! Rationals are written as strings `"p/q"`, integers as JSON numbers of any
//! size.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Map, Value};

use crate::construct::{ConstructionResult, Details, Verification};
use crate::diagram::{decompose_classes, ClassInfo, Diagram};
use crate::error::Result;
use crate::exactmath::field::FieldElement;
use crate::exactmath::poly::{fmt_rational, render_poly, Polynomial, Rational};
use crate::exactmath::roots::{approx_string, RealAlgebraic};
use crate::goodness::{
    bernoulli_type_rational, is_good, multiplicative_s_rational, quotient_condition_witness,
    GoodnessVerdict, QuotientWitness,
};
use crate::measure::{build_measure_with, ErgodicMeasure};
use crate::values::{Certificate, GroupEquality, LatticeGroup, MembershipVerdict};

/// An arbitrary-size integer as a JSON number.
pub fn int_value(n: &BigInt) -> Value {
    serde_json::from_str(&n.to_string()).expect("integer literal")
}

pub fn int_vec(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_value).collect())
}

pub fn rat_value(r: &Rational) -> Value {
    Value::String(fmt_rational(r))
}

fn rat_vec(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat_value).collect())
}

/// Width to which displayed isolating intervals are refined.
fn display_width() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(1u64) << 48)
}

pub fn real_value(x: &RealAlgebraic, minpoly: &Polynomial) -> Value {
    let r = x.refined(&display_width());
    json!({
        "minpoly": render_poly(minpoly, "t"),
        "interval": [rat_value(r.lo()), rat_value(r.hi())],
        "exact": r.as_rational().map(rat_value),
        "approx": approx_string(r.to_f64()),
    })
}

/// A field element: power-basis coefficients in `l`, the rendered polynomial
/// and an approximation.
pub fn element_value(e: &FieldElement) -> Value {
    json!({
        "value": e.to_string(),
        "coeffs": rat_vec(e.coeffs()),
        "approx": e.approx(),
    })
}

pub fn certificate_value(c: &Certificate) -> Value {
    match c {
        Certificate::OutOfRange { above_one } => json!({
            "kind": "out-of-range",
            "above_one": above_one,
        }),
        Certificate::Expansion {
            exponent,
            coefficients,
        } => json!({
            "kind": "expansion",
            "exponent": exponent,
            "coefficients": int_vec(coefficients),
        }),
        Certificate::Orbit {
            states,
            cycle_start,
        } => json!({
            "kind": "orbit",
            "states": states.iter().map(|s| rat_vec(s)).collect::<Vec<_>>(),
            "cycle_start": cycle_start,
        }),
    }
}

pub fn membership_value(v: &MembershipVerdict) -> Value {
    json!({
        "member": v.member,
        "exponent": v.exponent,
        "certificate": certificate_value(&v.certificate),
    })
}

pub fn goodness_value(v: &GoodnessVerdict) -> Value {
    json!({
        "good": v.good,
        "branch": v.branch.as_str(),
        "exponent": v.exponent,
        "alpha_gcd": v.alpha_gcd.as_ref().map(int_value),
        "residual": v.residual.as_ref().map(int_value),
        "quotient_index": v.quotient_index.as_ref().map(int_value),
        "expansions": v.expansions.iter().map(|(vert, c)| json!({
            "vertex": vert,
            "coefficients": int_vec(c),
        })).collect::<Vec<_>>(),
        "failing_vertex": v.failing_vertex,
        "orbit": v.orbit.as_ref().map(|(states, start)| json!({
            "states": states.iter().map(|s| rat_vec(s)).collect::<Vec<_>>(),
            "cycle_start": start,
        })),
    })
}

pub fn lattice_value(l: &LatticeGroup) -> Value {
    let (den, basis) = l.canonical();
    json!({
        "den": int_value(&den),
        "basis": basis.iter().map(|r| int_vec(r)).collect::<Vec<_>>(),
        "multiplier_matrix": l.mul_matrix().iter().map(|r| int_vec(r)).collect::<Vec<_>>(),
        "covolume": rat_value(&l.covolume()),
    })
}

pub fn witness_value(w: &QuotientWitness) -> Value {
    json!({
        "prime": int_value(&w.prime),
        "value": format!("1/{}", w.prime),
        "excluded": int_vec(&w.excluded),
        "verdict": membership_value(&w.verdict),
    })
}

pub fn equality_value(e: &GroupEquality) -> Value {
    json!({ "equal": e.equal, "reason": e.reason })
}

fn class_value(c: &ClassInfo) -> Value {
    let measure = if c.distinguished {
        "finite"
    } else if c.trivial {
        "none"
    } else {
        "infinite-measure-unsupported"
    };
    json!({
        "id": c.id,
        "members": c.members,
        "perron": real_value(&c.perron, &c.minpoly),
        "trivial": c.trivial,
        "minimal": c.minimal,
        "initial": c.initial,
        "distinguished": c.distinguished,
        "measure": measure,
    })
}

/// Full record of one ergodic measure.
pub fn measure_value(mu: &ErgodicMeasure, perron: &RealAlgebraic) -> Result<Value> {
    let good = is_good(mu)?;
    let mut m = Map::new();
    m.insert("class".into(), json!(mu.class_id()));
    m.insert(
        "lambda".into(),
        real_value(perron, mu.field().minpoly()),
    );
    m.insert("field_degree".into(), json!(mu.field_degree()));
    m.insert("support".into(), json!(mu.support()));
    m.insert("alpha".into(), json!(mu.alpha_members()));
    m.insert(
        "reduced_vector".into(),
        Value::Array(mu.reduced_vector().iter().map(element_value).collect()),
    );
    m.insert("goodness".into(), goodness_value(&good));
    m.insert("lattice".into(), lattice_value(mu.lattice()?));
    let rational = match mu.rational_form() {
        None => Value::Null,
        Some(rf) => {
            let bernoulli = if good.good {
                Some(bernoulli_type_rational(mu)?)
            } else {
                None
            };
            json!({
                "q": int_value(&rf.q),
                "p": int_vec(&rf.p),
                "bernoulli_type": bernoulli,
                "multiplicative": multiplicative_s_rational(mu)?,
                "quotient_witness": witness_value(&quotient_condition_witness(mu)?),
            })
        }
    };
    m.insert("rational".into(), rational);
    Ok(Value::Object(m))
}

/// Classification report for a diagram.
pub fn analyze(d: &Diagram) -> Result<Value> {
    let dec = decompose_classes(d)?;
    let mut measures = Vec::new();
    for c in dec.classes.iter().filter(|c| c.distinguished) {
        let mu = build_measure_with(d, &dec, c.id)?;
        measures.push(measure_value(&mu, &c.perron)?);
    }
    Ok(json!({
        "diagram": d.to_value(),
        "size": d.size(),
        "permutation": dec.permutation(),
        "classes": dec.classes.iter().map(class_value).collect::<Vec<_>>(),
        "minimal_components": dec.minimal_count(),
        "measures": measures,
    }))
}

pub fn verification_value(v: &Verification) -> Value {
    json!({
        "group_equal": v.group_equal,
        "is_good": v.good,
        "eigen_identity": v.eigen_identity,
        "minimal_components": v.minimal_components,
        "expected_minimal_components": v.expected_minimal_components,
        "minimal_components_ok": v.minimal_components_ok(),
        "all_ok": v.all_ok(),
    })
}

fn details_value(d: &Details) -> Value {
    match d {
        Details::RationalFamily { q, lambda, i, psi } => json!({
            "kind": "rational",
            "q": q,
            "lambda": lambda,
            "i": i,
            "psi": int_value(psi),
        }),
        Details::Extension {
            r,
            n,
            q0,
            q_alpha,
            psi,
            z,
            new_vertex,
            minimal_components_source,
        } => json!({
            "kind": "extend",
            "R": r,
            "N": n,
            "M": r + n,
            "q_new": int_value(q0),
            "q_alpha": int_vec(q_alpha),
            "psi": element_value(psi),
            "z": z.iter().map(element_value).collect::<Vec<_>>(),
            "new_vertex": new_vertex,
            "minimal_components_source": minimal_components_source,
        }),
        Details::Collapse {
            m,
            unchanged,
            vertices,
            relations,
            psi,
        } => json!({
            "kind": "simplify",
            "M": m,
            "unchanged": unchanged,
            "vertices": vertices,
            "relations": relations.iter().map(|r| json!({
                "vertex": r.vertex,
                "q": int_value(&r.q),
                "p": int_vec(&r.p),
            })).collect::<Vec<_>>(),
            "psi": element_value(psi),
        }),
    }
}

/// The sidecar record of a construction: everything except the diagram.
pub fn construction_sidecar(res: &ConstructionResult) -> Value {
    let mu = &res.measure;
    json!({
        "class_id": res.class_id,
        "minimal_components": res.minimal_components,
        "verification": verification_value(&res.verification),
        "details": details_value(&res.details),
        "measure": {
            "lambda_minpoly": render_poly(mu.field().minpoly(), "t"),
            "lambda": element_value(mu.lambda()),
            "support": mu.support(),
            "reduced_vector": mu.reduced_vector().iter().map(element_value).collect::<Vec<_>>(),
        },
    })
}

pub fn construction_value(res: &ConstructionResult) -> Value {
    let mut v = construction_sidecar(res);
    v.as_object_mut()
        .unwrap()
        .insert("diagram".into(), res.diagram.to_value());
    v
}

/// Serializes with two-space indentation and a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

