//! Stationary Bratteli diagrams: parsing, validation, heights and the
//! decomposition of the vertex set into classes.
//!
//! The incidence matrix `F` has `F[v][w]` edges from vertex `w` on one level
//! to vertex `v` on the next. Classes are the strongly connected components of
//! the graph with an arrow `w -> v` whenever `F[v][w] > 0`; class `a` lies above
//! class `b` when some path leads from `b` to `a`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::cmp::Reverse;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactmath::factor::factor_over_rationals;
use crate::exactmath::matrix::{char_poly_int, IntMatrix};
use crate::exactmath::poly::{int_rat, Polynomial};
use crate::exactmath::roots::{compare_real, isolate_real_roots, RealAlgebraic};
use crate::exactmath::DEFAULT_DEGREE_BOUND;

/// Largest diagram accepted by the analysis entry points.
pub const SIZE_GUARD: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    name: Option<String>,
    incidence: Vec<Vec<BigUint>>,
}

impl Diagram {
    /// Validates and wraps an incidence matrix.
    pub fn new(name: Option<String>, incidence: Vec<Vec<BigUint>>) -> Result<Self> {
        let n = incidence.len();
        if n == 0 {
            return Err(Error::InvalidDiagram("incidence matrix is empty".into()));
        }
        for (i, row) in incidence.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDiagram(format!(
                    "row {i} has {} entries, expected {n} (matrix must be square)",
                    row.len()
                )));
            }
        }
        for (i, row) in incidence.iter().enumerate() {
            if row.iter().all(|x| x.is_zero()) {
                return Err(Error::InvalidDiagram(format!(
                    "row {i} is zero: vertex {i} has no incoming edges"
                )));
            }
        }
        for j in 0..n {
            if incidence.iter().all(|row| row[j].is_zero()) {
                return Err(Error::InvalidDiagram(format!(
                    "column {j} is zero: vertex {j} has no outgoing edges"
                )));
            }
        }
        Ok(Diagram { name, incidence })
    }

    pub fn from_u64(name: Option<&str>, rows: &[Vec<u64>]) -> Result<Self> {
        Self::new(
            name.map(str::to_string),
            rows.iter()
                .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
                .collect(),
        )
    }

    /// Parses the JSON form `{"name": ..., "incidence": [[...], ...]}`.
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Json("top level must be an object".into()))?;
        let name = match obj.get("name") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::Json("\"name\" must be a string".into())),
        };
        let rows = obj
            .get("incidence")
            .ok_or_else(|| Error::Json("missing \"incidence\"".into()))?
            .as_array()
            .ok_or_else(|| Error::Json("\"incidence\" must be an array of rows".into()))?;
        let mut incidence = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Json(format!("row {i} must be an array")))?;
            let mut r = Vec::with_capacity(row.len());
            for (j, x) in row.iter().enumerate() {
                r.push(parse_entry(x, i, j)?);
            }
            incidence.push(r);
        }
        Diagram::new(name, incidence)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: Option<String>) -> Self {
        self.name = name;
        self
    }

    pub fn size(&self) -> usize {
        self.incidence.len()
    }

    pub fn incidence(&self) -> &[Vec<BigUint>] {
        &self.incidence
    }

    pub fn entry(&self, v: usize, w: usize) -> &BigUint {
        &self.incidence[v][w]
    }

    /// `F` as a signed integer matrix.
    pub fn incidence_int(&self) -> IntMatrix {
        self.incidence
            .iter()
            .map(|r| r.iter().map(|x| BigInt::from(x.clone())).collect())
            .collect()
    }

    /// `A = F^T`, so that `A[i][j] = F[j][i]`.
    pub fn a_matrix(&self) -> IntMatrix {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(self.incidence[j][i].clone())).collect())
            .collect()
    }

    /// Diagram whose incidence is `a^T`.
    pub fn from_a_matrix(name: Option<String>, a: &IntMatrix) -> Result<Self> {
        let n = a.len();
        let mut inc = vec![vec![BigUint::zero(); n]; n];
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                inc[j][i] = x
                    .to_biguint()
                    .ok_or_else(|| Error::Internal("negative entry in constructed matrix".into()))?;
            }
        }
        Diagram::new(name, inc)
    }

    /// Heights `h^(1), ..., h^(n)`, with `h^(1)` all ones and `h^(m+1) = F h^(m)`.
    pub fn heights_upto(&self, n: usize) -> Vec<Vec<BigUint>> {
        let size = self.size();
        let mut out = Vec::with_capacity(n);
        if n == 0 {
            return out;
        }
        out.push(vec![BigUint::one(); size]);
        for _ in 1..n {
            let prev = out.last().unwrap();
            let next = (0..size)
                .map(|v| {
                    let mut s = BigUint::zero();
                    for (w, h) in prev.iter().enumerate() {
                        let f = &self.incidence[v][w];
                        if !f.is_zero() {
                            s += f * h;
                        }
                    }
                    s
                })
                .collect();
            out.push(next);
        }
        out
    }

    /// Heights on level `n >= 1`.
    pub fn heights(&self, n: usize) -> Result<Vec<BigUint>> {
        if n == 0 {
            return Err(Error::Precondition("levels are numbered from 1".into()));
        }
        Ok(self.heights_upto(n).pop().unwrap())
    }

    /// Compact JSON with one matrix row per line.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        if let Some(n) = &self.name {
            s.push_str(&format!("  \"name\": {},\n", Value::String(n.clone())));
        }
        s.push_str("  \"incidence\": [\n");
        for (i, row) in self.incidence.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("    [{}]", cells.join(", ")));
            s.push_str(if i + 1 < self.size() { ",\n" } else { "\n" });
        }
        s.push_str("  ]\n}\n");
        s
    }

    pub fn to_value(&self) -> Value {
        serde_json::from_str(&self.to_json()).expect("diagram JSON is well formed")
    }
}

fn parse_entry(x: &Value, i: usize, j: usize) -> Result<BigUint> {
    let Value::Number(n) = x else {
        return Err(Error::Json(format!("entry ({i}, {j}) is not a number")));
    };
    let txt = n.to_string();
    if txt.starts_with('-') {
        return Err(Error::InvalidDiagram(format!(
            "entry ({i}, {j}) is negative: {txt}"
        )));
    }
    if !txt.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Json(format!(
            "entry ({i}, {j}) is not a non-negative integer: {txt}"
        )));
    }
    Ok(txt.parse().expect("digits"))
}

/// Combinatorial class structure, without spectral data.
#[derive(Clone, Debug)]
pub struct ClassStructure {
    /// Classes in topological order, lower classes first.
    pub classes: Vec<Vec<usize>>,
    pub vertex_class: Vec<usize>,
    /// `reach[a][b]` iff class `a` lies above or equals class `b`.
    pub reach: Vec<Vec<bool>>,
}

impl ClassStructure {
    pub fn compute(d: &Diagram) -> Self {
        let n = d.size();
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|w| (0..n).filter(|&v| !d.incidence[v][w].is_zero()).collect())
            .collect();
        let comps = tarjan(&succ);
        let mut comp_of = vec![0usize; n];
        for (c, members) in comps.iter().enumerate() {
            for &v in members {
                comp_of[v] = c;
            }
        }
        let nc = comps.len();
        let mut cedges = vec![Vec::new(); nc];
        let mut indeg = vec![0usize; nc];
        for w in 0..n {
            for &v in &succ[w] {
                let (a, b) = (comp_of[w], comp_of[v]);
                if a != b && !cedges[a].contains(&b) {
                    cedges[a].push(b);
                    indeg[b] += 1;
                }
            }
        }
        let min_vertex: Vec<usize> = comps.iter().map(|m| *m.iter().min().unwrap()).collect();
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..nc)
            .filter(|&c| indeg[c] == 0)
            .map(|c| Reverse((min_vertex[c], c)))
            .collect();
        let mut order = Vec::with_capacity(nc);
        while let Some(Reverse((_, c))) = heap.pop() {
            order.push(c);
            for &b in &cedges[c] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    heap.push(Reverse((min_vertex[b], b)));
                }
            }
        }
        let mut new_id = vec![0usize; nc];
        for (i, &c) in order.iter().enumerate() {
            new_id[c] = i;
        }
        let classes: Vec<Vec<usize>> = order
            .iter()
            .map(|&c| {
                let mut m = comps[c].clone();
                m.sort_unstable();
                m
            })
            .collect();
        let vertex_class: Vec<usize> = comp_of.iter().map(|&c| new_id[c]).collect();
        let mut preds = vec![Vec::new(); nc];
        for (a, outs) in cedges.iter().enumerate() {
            for &b in outs {
                preds[new_id[b]].push(new_id[a]);
            }
        }
        let mut reach = vec![vec![false; nc]; nc];
        for a in 0..nc {
            reach[a][a] = true;
            for &p in &preds[a] {
                for b in 0..nc {
                    if reach[p][b] {
                        reach[a][b] = true;
                    }
                }
            }
        }
        ClassStructure {
            classes,
            vertex_class,
            reach,
        }
    }

    pub fn is_minimal(&self, a: usize) -> bool {
        (0..self.classes.len()).all(|b| b == a || !self.reach[a][b])
    }

    pub fn is_initial(&self, a: usize) -> bool {
        (0..self.classes.len()).all(|b| b == a || !self.reach[b][a])
    }

    /// Vertex order putting `F` in block lower-triangular form.
    pub fn permutation(&self) -> Vec<usize> {
        self.classes.iter().flatten().copied().collect()
    }
}

fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct St<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(st: &mut St, v: usize) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on[v] = true;
        for i in 0..st.succ[v].len() {
            let w = st.succ[v][i];
            match st.index[w] {
                None => {
                    visit(st, w);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on[w] => st.low[v] = st.low[v].min(iw),
                _ => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.out.push(comp);
        }
    }
    let n = succ.len();
    let mut st = St {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(&mut st, v);
        }
    }
    st.out
}

/// A class with its Perron data and order-theoretic flags.
#[derive(Clone, Debug)]
pub struct ClassInfo {
    pub id: usize,
    pub members: Vec<usize>,
    pub perron: RealAlgebraic,
    /// Minimal polynomial of the Perron root.
    pub minpoly: Polynomial,
    /// A single vertex without a loop; its Perron root is 0.
    pub trivial: bool,
    pub minimal: bool,
    pub initial: bool,
    pub distinguished: bool,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub structure: ClassStructure,
    pub classes: Vec<ClassInfo>,
}

impl Decomposition {
    pub fn class(&self, id: usize) -> Result<&ClassInfo> {
        self.classes.get(id).ok_or(Error::UnknownClass(id))
    }

    pub fn vertex_class(&self) -> &[usize] {
        &self.structure.vertex_class
    }

    /// Whether class `a` lies above or equals class `b`.
    pub fn above_or_equal(&self, a: usize, b: usize) -> bool {
        self.structure.reach[a][b]
    }

    /// Vertices of all classes at or below `a`, in increasing order.
    pub fn support(&self, a: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.structure.vertex_class.len())
            .filter(|&i| self.structure.reach[a][self.structure.vertex_class[i]])
            .collect();
        v.sort_unstable();
        v
    }

    pub fn permutation(&self) -> Vec<usize> {
        self.structure.permutation()
    }

    pub fn minimal_count(&self) -> usize {
        self.classes.iter().filter(|c| c.minimal).count()
    }
}

/// Decomposes `d` into classes with Perron roots and flags.
pub fn decompose_classes(d: &Diagram) -> Result<Decomposition> {
    if d.size() > SIZE_GUARD {
        return Err(Error::TooLarge {
            size: d.size().to_string(),
            guard: SIZE_GUARD,
        });
    }
    let structure = ClassStructure::compute(d);
    let mut classes = Vec::with_capacity(structure.classes.len());
    for (id, members) in structure.classes.iter().enumerate() {
        let block: IntMatrix = members
            .iter()
            .map(|&v| {
                members
                    .iter()
                    .map(|&w| BigInt::from(d.incidence[v][w].clone()))
                    .collect()
            })
            .collect();
        let (perron, minpoly) = perron_root(&block)?;
        let trivial = members.len() == 1 && block[0][0].is_zero();
        classes.push(ClassInfo {
            id,
            members: members.clone(),
            perron,
            minpoly,
            trivial,
            minimal: structure.is_minimal(id),
            initial: structure.is_initial(id),
            distinguished: false,
        });
    }
    for a in 0..classes.len() {
        let dist = !classes[a].trivial
            && (0..classes.len()).all(|b| {
                b == a
                    || !structure.reach[a][b]
                    || compare_real(&classes[a].perron, &classes[b].perron) == Ordering::Greater
            });
        classes[a].distinguished = dist;
    }
    Ok(Decomposition { structure, classes })
}

/// Number of minimal classes; purely combinatorial.
pub fn count_minimal_components(d: &Diagram) -> usize {
    let s = ClassStructure::compute(d);
    (0..s.classes.len()).filter(|&a| s.is_minimal(a)).count()
}

/// Perron root and its minimal polynomial for an irreducible non-negative block.
pub fn perron_root(block: &IntMatrix) -> Result<(RealAlgebraic, Polynomial)> {
    let n = block.len();
    let exact = |v: BigInt| {
        let r = int_rat(&v);
        (RealAlgebraic::from_rational(r.clone()), Polynomial::linear_root(&r))
    };
    if n == 1 {
        return Ok(exact(block[0][0].clone()));
    }
    let row_sums: Vec<BigInt> = block.iter().map(|r| r.iter().sum()).collect();
    if row_sums.iter().all(|s| s == &row_sums[0]) {
        return Ok(exact(row_sums[0].clone()));
    }
    let col_sums: Vec<BigInt> = (0..n).map(|j| block.iter().map(|r| &r[j]).sum()).collect();
    if col_sums.iter().all(|s| s == &col_sums[0]) {
        return Ok(exact(col_sums[0].clone()));
    }
    if n > DEFAULT_DEGREE_BOUND {
        return Err(Error::UnsupportedDegree {
            degree: n,
            bound: DEFAULT_DEGREE_BOUND,
        });
    }
    let cp = char_poly_int(block);
    let fac = factor_over_rationals(&cp, DEFAULT_DEGREE_BOUND)?;
    let mut best: Option<(RealAlgebraic, Polynomial)> = None;
    for (f, _) in &fac.factors {
        if let Some(r) = isolate_real_roots(f).pop() {
            let better = match &best {
                None => true,
                Some((b, _)) => compare_real(&r, b) == Ordering::Greater,
            };
            if better {
                best = Some((r, f.clone()));
            }
        }
    }
    let (r, f) = best.ok_or_else(|| Error::Internal("block without real eigenvalue".into()))?;
    Ok((r, f.monic()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            Diagram::parse(r#"{"incidence": [[0,1],[0,1]]}"#),
            Err(Error::InvalidDiagram(m)) if m.contains("column 0")
        ));
        assert!(matches!(
            Diagram::parse(r#"{"incidence": [[1,-1],[1,1]]}"#),
            Err(Error::InvalidDiagram(m)) if m.contains("negative")
        ));
        assert!(matches!(
            Diagram::parse(r#"{"incidence": [[1,2],[1]]}"#),
            Err(Error::InvalidDiagram(_))
        ));
        assert!(matches!(
            Diagram::parse(r#"{"incidence": [[1.5]]}"#),
            Err(Error::Json(_))
        ));
        assert!(matches!(Diagram::parse("[1]"), Err(Error::Json(_))));
    }

    #[test]
    fn big_entries_roundtrip() {
        let text = r#"{"name":"big","incidence":[[123456789012345678901234567890]]}"#;
        let d = Diagram::parse(text).unwrap();
        assert_eq!(d.entry(0, 0).to_string(), "123456789012345678901234567890");
        assert_eq!(Diagram::parse(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn heights_of_example() {
        let d = Diagram::from_u64(None, &[vec![1, 1, 0], vec![1, 2, 0], vec![0, 1, 3]]).unwrap();
        let h = d.heights(4).unwrap();
        let h: Vec<u64> = h.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(h, vec![13, 21, 53]);
    }

    #[test]
    fn class_order_and_flags() {
        let d = Diagram::from_u64(None, &[vec![1, 1, 0], vec![1, 2, 0], vec![0, 1, 3]]).unwrap();
        let dec = decompose_classes(&d).unwrap();
        assert_eq!(dec.classes.len(), 2);
        assert_eq!(dec.classes[0].members, vec![0, 1]);
        assert_eq!(dec.classes[1].members, vec![2]);
        assert!(dec.classes[0].minimal && dec.classes[0].distinguished);
        assert!(dec.classes[1].initial && dec.classes[1].distinguished);
        assert_eq!(dec.classes[0].minpoly, Polynomial::from_ints(&[1, -3, 1]));
        assert_eq!(dec.support(1), vec![0, 1, 2]);
    }

    #[test]
    fn trivial_class_is_allowed() {
        let d = Diagram::from_u64(None, &[vec![1, 0, 0], vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
        let dec = decompose_classes(&d).unwrap();
        let t = &dec.classes[dec.vertex_class()[1]];
        assert!(t.trivial && !t.distinguished && !t.minimal);
    }
}
