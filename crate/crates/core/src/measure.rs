//! Finite ergodic invariant measures attached to distinguished classes.
//!
//! For a distinguished class `a` with Perron root `lambda`, the measure is
//! determined by the positive eigenvector `x` of `A = F^T` restricted to the
//! vertices at or below `a`, normalized so that its entries sum to one. The
//! cylinder set of a path ending at vertex `v` on level `n` has measure
//! `x_v * lambda^-(n-1)`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::diagram::{decompose_classes, Decomposition, Diagram};
use crate::error::{Error, Result};
use crate::exactmath::field::{FieldElement, FieldRef, NumberField};
use crate::exactmath::poly::int_rat;
use crate::values::LatticeGroup;

/// Integer form of a rational measure: `x_i = p_i / q` with `gcd(p) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalForm {
    pub q: BigInt,
    pub p: Vec<BigInt>,
}

#[derive(Clone, Debug)]
pub struct ErgodicMeasure {
    diagram: Arc<Diagram>,
    class_id: usize,
    field: FieldRef,
    lambda: FieldElement,
    support: Vec<usize>,
    alpha: Vec<usize>,
    x: Vec<FieldElement>,
    rational: Option<RationalForm>,
    lattice: OnceLock<LatticeGroup>,
}

impl ErgodicMeasure {
    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn class_id(&self) -> usize {
        self.class_id
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    /// The Perron root as a field element.
    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }

    pub fn field_degree(&self) -> usize {
        self.field.degree()
    }

    pub fn is_rational(&self) -> bool {
        self.field.degree() == 1
    }

    /// Support vertices in increasing order.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Vertices of the class itself.
    pub fn alpha_members(&self) -> &[usize] {
        &self.alpha
    }

    /// Support vertices outside the class.
    pub fn non_alpha(&self) -> Vec<usize> {
        self.support
            .iter()
            .copied()
            .filter(|v| !self.alpha.contains(v))
            .collect()
    }

    /// Reduced vector entries, aligned with `support()`.
    pub fn reduced_vector(&self) -> &[FieldElement] {
        &self.x
    }

    /// Entry for a diagram vertex (zero off the support).
    pub fn x_of(&self, vertex: usize) -> Option<FieldElement> {
        if vertex >= self.diagram.size() {
            return None;
        }
        Some(match self.support.binary_search(&vertex) {
            Ok(i) => self.x[i].clone(),
            Err(_) => self.field.zero(),
        })
    }

    /// Entries for the class vertices.
    pub fn alpha_vector(&self) -> Vec<FieldElement> {
        self.alpha.iter().map(|&v| self.x_of(v).unwrap()).collect()
    }

    pub fn rational_form(&self) -> Option<&RationalForm> {
        self.rational.as_ref()
    }

    /// The lattice `H` spanned by the reduced vector, with multiplier `lambda`.
    pub fn lattice(&self) -> Result<&LatticeGroup> {
        if let Some(l) = self.lattice.get() {
            return Ok(l);
        }
        let l = LatticeGroup::new(&self.field, &self.x, &self.lambda)?;
        Ok(self.lattice.get_or_init(|| l))
    }
}

/// Builds the measure of class `class_id`, decomposing the diagram first.
pub fn build_measure(d: &Diagram, class_id: usize) -> Result<ErgodicMeasure> {
    let dec = decompose_classes(d)?;
    build_measure_with(d, &dec, class_id)
}

/// Measures of all distinguished classes.
pub fn ergodic_measures(d: &Diagram) -> Result<Vec<ErgodicMeasure>> {
    let dec = decompose_classes(d)?;
    dec.classes
        .iter()
        .filter(|c| c.distinguished)
        .map(|c| build_measure_with(d, &dec, c.id))
        .collect()
}

pub fn build_measure_with(
    d: &Diagram,
    dec: &Decomposition,
    class_id: usize,
) -> Result<ErgodicMeasure> {
    let class = dec.class(class_id)?;
    if !class.distinguished {
        return Err(Error::InfiniteMeasureUnsupported(class_id));
    }
    let field = match class.perron.as_rational() {
        Some(r) => NumberField::rational(r),
        None if class.minpoly.degree() == 1 => NumberField::rational(&-class.minpoly.coeff(0)),
        None => NumberField::new(class.minpoly.clone(), &class.perron)?,
    };
    let lambda = field.generator();
    let support = dec.support(class_id);
    let x = kernel_vector(d, &support, &lambda)?;
    for (v, xi) in support.iter().zip(&x) {
        if xi.sign() <= 0 {
            return Err(Error::Internal(format!(
                "eigenvector entry at vertex {v} is not positive"
            )));
        }
    }
    verify_eigen(d, &support, &x, &lambda)?;
    let rational = if field.degree() == 1 {
        let q = x
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.coeffs()[0].denom()));
        let p: Vec<BigInt> = x
            .iter()
            .map(|e| (&e.coeffs()[0] * int_rat(&q)).to_integer())
            .collect();
        Some(RationalForm { q, p })
    } else {
        None
    };
    Ok(ErgodicMeasure {
        diagram: Arc::new(d.clone()),
        class_id,
        field,
        lambda,
        support,
        alpha: class.members.clone(),
        x,
        rational,
        lattice: OnceLock::new(),
    })
}

/// One-dimensional kernel of `A_S - lambda I`, normalized to sum one.
fn kernel_vector(d: &Diagram, support: &[usize], lambda: &FieldElement) -> Result<Vec<FieldElement>> {
    let n = support.len();
    let field = lambda.field().clone();
    let mut rows: Vec<BTreeMap<usize, FieldElement>> = (0..n)
        .map(|i| {
            let mut r = BTreeMap::new();
            for (j, &w) in support.iter().enumerate() {
                // A[i][j] = F[j][i]
                let a = d.entry(w, support[i]);
                if !a.is_zero() {
                    r.insert(
                        j,
                        FieldElement::from_rational(&field, int_rat(&BigInt::from(a.clone()))),
                    );
                }
            }
            let diag = r.remove(&i).unwrap_or_else(|| field.zero());
            let v = &diag - lambda;
            if !v.is_zero() {
                r.insert(i, v);
            }
            r
        })
        .collect();
    let mut used = vec![false; n];
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    for col in 0..n {
        let piv = (0..n)
            .filter(|&r| !used[r] && rows[r].contains_key(&col))
            .min_by_key(|&r| rows[r].len());
        let Some(piv) = piv else { continue };
        used[piv] = true;
        pivot_of_col[col] = Some(piv);
        let inv = rows[piv][&col].inv()?;
        let prow: Vec<(usize, FieldElement)> =
            rows[piv].iter().map(|(&j, v)| (j, v * &inv)).collect();
        rows[piv] = prow.iter().cloned().collect();
        for r in 0..n {
            if r == piv {
                continue;
            }
            let Some(f) = rows[r].get(&col).cloned() else { continue };
            for (j, v) in &prow {
                let cur = rows[r].remove(j).unwrap_or_else(|| field.zero());
                let nv = &cur - &(&f * v);
                if !nv.is_zero() {
                    rows[r].insert(*j, nv);
                }
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&c| pivot_of_col[c].is_none()).collect();
    if free.len() != 1 {
        return Err(Error::Internal(format!(
            "eigenspace has dimension {} instead of 1",
            free.len()
        )));
    }
    let f = free[0];
    let mut x: Vec<FieldElement> = (0..n)
        .map(|c| match pivot_of_col[c] {
            None => field.one(),
            Some(r) => rows[r].get(&f).map(|v| v.neg()).unwrap_or_else(|| field.zero()),
        })
        .collect();
    let mut sum = field.zero();
    for v in &x {
        sum = &sum + v;
    }
    let inv = sum.inv()?;
    for v in x.iter_mut() {
        *v = &*v * &inv;
    }
    Ok(x)
}

fn verify_eigen(
    d: &Diagram,
    support: &[usize],
    x: &[FieldElement],
    lambda: &FieldElement,
) -> Result<()> {
    let field = lambda.field();
    for (i, &v) in support.iter().enumerate() {
        let mut acc = field.zero();
        for (j, &w) in support.iter().enumerate() {
            let a = d.entry(w, v);
            if !a.is_zero() {
                acc = &acc + &x[j].scale(&int_rat(&BigInt::from(a.clone())));
            }
        }
        if acc != lambda * &x[i] {
            return Err(Error::Internal(format!(
                "eigen equation fails at vertex {v}"
            )));
        }
    }
    Ok(())
}

/// Measure of a cylinder set ending at `vertex` on level `level >= 1`.
pub fn cylinder_measure(mu: &ErgodicMeasure, vertex: usize, level: usize) -> Result<FieldElement> {
    if level == 0 {
        return Err(Error::Precondition("levels are numbered from 1".into()));
    }
    let x = mu.x_of(vertex).ok_or(Error::VertexOutOfRange {
        vertex,
        size: mu.diagram.size(),
    })?;
    let s = mu.lambda.pow(-(level as i64 - 1))?;
    Ok(&x * &s)
}
