//! The Rinehart complex `Alt_{P/I}(I/I², P/I)` in low arity.
//!
//! Cochains are stored by their values on increasing tuples of the user's
//! generators. Since `I/I²` need not be free, a tuple map only defines a
//! cochain when it kills the syzygies of the generators; those are read off
//! the degree `-2` generators of the Tate resolution.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::algebra::{bracket, Monomial, SuperPolynomial, VariableTable};
use crate::cohomology::BrstComplex;
use crate::error::{Error, Result};
use crate::ideal::{groebner_basis, IdealPresentation, QuotientElement};
use crate::koszul_tate::{build_resolution, ResolutionWindow};
use crate::linalg::{ColumnMatrix, Echelon, SparseVec};
use crate::Rational;

/// Largest arity `d` accepts.
pub const MAX_ARITY: usize = 2;

/// Values of an alternating cochain on increasing generator tuples; missing
/// tuples are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RinehartCochain {
    pub arity: usize,
    pub values: BTreeMap<Vec<usize>, SuperPolynomial>,
}

impl RinehartCochain {
    pub fn zero(arity: usize) -> Self {
        RinehartCochain { arity, values: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(SuperPolynomial::is_zero)
    }

    /// Value on an arbitrary tuple, using the alternating property.
    pub fn value(&self, table: &Arc<VariableTable>, tuple: &[usize]) -> SuperPolynomial {
        let mut sorted = tuple.to_vec();
        let mut odd = false;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return SuperPolynomial::zero(table);
        }
        match self.values.get(&sorted) {
            None => SuperPolynomial::zero(table),
            Some(v) if odd => -v,
            Some(v) => v.clone(),
        }
    }

    fn set(&mut self, tuple: Vec<usize>, v: SuperPolynomial) {
        if v.is_zero() {
            self.values.remove(&tuple);
        } else {
            self.values.insert(tuple, v);
        }
    }
}

/// Drops, back to front, every generator lying in the ideal of the ones
/// still kept. Returns the reduced presentation and the kept indices.
pub fn redundancy_reduced(ideal: &IdealPresentation) -> Result<(IdealPresentation, Vec<usize>)> {
    let table = ideal.table();
    let gens = ideal.generators();
    let mut kept: Vec<usize> = (0..gens.len()).collect();
    for k in (0..gens.len()).rev() {
        let others: Vec<_> = kept.iter().filter(|&&j| j != k).map(|&j| gens[j].clone()).collect();
        if groebner_basis(table, &others)?.is_member(&gens[k]) {
            kept.retain(|&j| j != k);
        }
    }
    let reduced: Vec<_> = kept.iter().map(|&j| gens[j].clone()).collect();
    Ok((groebner_basis(table, &reduced)?, kept))
}

fn increasing_tuples(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, q, &mut Vec::new(), &mut out);
    out
}

fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

#[derive(Debug, Clone)]
pub struct RinehartComplex {
    ideal: IdealPresentation,
    weights: Vec<i32>,
    /// `{φ_i, φ_j} = Σ_k structure[i][j][k] φ_k`.
    structure: Vec<Vec<Vec<SuperPolynomial>>>,
    /// Rows `a` with `Σ_k a_k φ_k = 0`, beyond the Koszul ones.
    syzygies: Vec<Vec<SuperPolynomial>>,
}

/// One row of the arity-by-weight comparison.
#[derive(Debug, Clone, Serialize)]
pub struct E1Row {
    pub arity: usize,
    pub weight: i32,
    pub rinehart: usize,
    pub brst: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct E1Comparison {
    /// False when the constraints are neither regular nor made regular by
    /// dropping redundant ones; nothing is compared then.
    pub identification_claimed: bool,
    pub rows: Vec<E1Row>,
    pub dimensions_match: bool,
    /// Sign `ε_q` with `π ∂ ι(h) = ε_q ι(dh)` on arity-`q` cochains.
    pub d1_signs: Vec<Option<i32>>,
    pub d1_matches: bool,
}

impl RinehartComplex {
    /// Builds the complex for a first-class ideal, collecting syzygies of the
    /// generators up to `syzygy_weight`.
    pub fn new(ideal: &IdealPresentation, syzygy_weight: i32) -> Result<Self> {
        let n = ideal.generators().len();
        let table = ideal.table();
        let mut structure = vec![vec![vec![SuperPolynomial::zero(table); n]; n]; n];
        for sf in ideal.is_first_class().into_result()? {
            for (k, c) in sf.coefficients.into_iter().enumerate() {
                structure[sf.j][sf.i][k] = -&c;
                structure[sf.i][sf.j][k] = c;
            }
        }
        for i in 0..n {
            let b = bracket(&ideal.generators()[i], &ideal.generators()[i]);
            if !b.is_zero() {
                structure[i][i] = ideal.express(&b).expect("first class");
            }
        }
        let weights = ideal
            .generators()
            .iter()
            .map(|g| IdealPresentation::homogeneous_degree(g).map(|d| d as i32))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NotHomogeneous("constraint".into()))?;
        let res = build_resolution(ideal, ResolutionWindow { max_weight: syzygy_weight, depth: 1 })?;
        let koszul: Vec<_> = res.generators().iter().filter(|g| g.degree == -1).map(|g| g.var).collect();
        let mut syzygies = Vec::new();
        for g in res.higher_generators() {
            let mut row = vec![SuperPolynomial::zero(table); n];
            for (k, &p) in koszul.iter().enumerate() {
                row[k] = g.delta.derive_right(p);
            }
            syzygies.push(row);
        }
        Ok(RinehartComplex { ideal: ideal.clone(), weights, structure, syzygies })
    }

    pub fn ideal(&self) -> &IdealPresentation {
        &self.ideal
    }

    pub fn syzygies(&self) -> &[Vec<SuperPolynomial>] {
        &self.syzygies
    }

    fn table(&self) -> &Arc<VariableTable> {
        self.ideal.table()
    }

    fn nf(&self, f: &SuperPolynomial) -> SuperPolynomial {
        self.ideal.normal_form(f).representative().clone()
    }

    /// `ρ(φ) f = {φ, f}` on classes.
    pub fn anchor(&self, phi: &SuperPolynomial, f: &QuotientElement) -> Result<QuotientElement> {
        if !self.ideal.is_member(phi) {
            return Err(Error::NotInIdeal(phi.to_string()));
        }
        Ok(self.ideal.normal_form(&bracket(phi, f.representative())))
    }

    /// The Rinehart differential:
    ///
    /// ```text
    /// (dh)(φ_0..φ_q) = Σ_i (-1)^i ρ(φ_i) h(..φ̂_i..)
    ///                + Σ_{i<j} (-1)^{i+j} h([φ_i, φ_j], ..φ̂_i..φ̂_j..)
    /// ```
    pub fn d(&self, h: &RinehartCochain) -> Result<RinehartCochain> {
        if h.arity > MAX_ARITY {
            return Err(Error::ArityUnsupported(h.arity));
        }
        let t = self.table();
        let gens = self.ideal.generators();
        let n = gens.len();
        let q = h.arity;
        let mut out = RinehartCochain::zero(q + 1);
        for tuple in increasing_tuples(n, q + 1) {
            let mut acc = SuperPolynomial::zero(t);
            for i in 0..=q {
                let mut rest = tuple.clone();
                let phi = rest.remove(i);
                acc.add_scaled(&bracket(&gens[phi], &h.value(t, &rest)), &sign(i));
            }
            for i in 0..=q {
                for j in i + 1..=q {
                    let rest: Vec<usize> = (0..=q)
                        .filter(|&k| k != i && k != j)
                        .map(|k| tuple[k])
                        .collect();
                    for k in 0..n {
                        let c = &self.structure[tuple[i]][tuple[j]][k];
                        if c.is_zero() {
                            continue;
                        }
                        let mut args = vec![k];
                        args.extend(&rest);
                        let v = &(c * &h.value(t, &args)).scale(&sign(i + j));
                        acc = &acc + v;
                    }
                }
            }
            out.set(tuple, self.nf(&acc));
        }
        Ok(out)
    }

    /// True if the tuple values kill every syzygy of the generators, so that
    /// they define a cochain on `I/I²`.
    pub fn is_well_defined(&self, h: &RinehartCochain) -> bool {
        self.syzygy_defects(h).is_empty()
    }

    fn syzygy_defects(&self, h: &RinehartCochain) -> Vec<(usize, Vec<usize>, SuperPolynomial)> {
        if h.arity == 0 {
            return Vec::new();
        }
        let t = self.table();
        let n = self.ideal.generators().len();
        let mut out = Vec::new();
        for (s, row) in self.syzygies.iter().enumerate() {
            for rest in increasing_tuples(n, h.arity - 1) {
                let mut acc = SuperPolynomial::zero(t);
                for (k, a) in row.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mut args = vec![k];
                    args.extend(&rest);
                    acc = &acc + &(a * &h.value(t, &args));
                }
                let r = self.nf(&acc);
                if !r.is_zero() {
                    out.push((s, rest, r));
                }
            }
        }
        out
    }

    /// Weight of the ghost-side label `η^I`, matching the BRST grading.
    fn tuple_weight(&self, tuple: &[usize]) -> i32 {
        tuple.iter().map(|&k| 2 - self.weights[k]).sum()
    }

    /// Basis of arity-`q` tuple maps of total weight `w`: a tuple and a
    /// standard monomial for its value.
    pub fn basis(&self, arity: usize, weight: i32) -> Vec<(Vec<usize>, Monomial)> {
        let n = self.ideal.generators().len();
        let mut out = Vec::new();
        for tuple in increasing_tuples(n, arity) {
            let vw = weight - self.tuple_weight(&tuple);
            if vw < 0 {
                continue;
            }
            for m in self.ideal.quotient_monomials(vw as u32) {
                out.push((tuple.clone(), m));
            }
        }
        out
    }

    fn cochain_of(&self, arity: usize, basis: &[(Vec<usize>, Monomial)], v: &SparseVec) -> RinehartCochain {
        let t = self.table();
        let mut h = RinehartCochain::zero(arity);
        for (&i, c) in v {
            let (tuple, m) = &basis[i];
            let mut cur = h.values.remove(tuple).unwrap_or_else(|| SuperPolynomial::zero(t));
            cur.add_term(m.clone(), c.clone());
            h.set(tuple.clone(), cur);
        }
        h
    }

    fn coordinates_of(&self, basis: &[(Vec<usize>, Monomial)], h: &RinehartCochain) -> SparseVec {
        let mut out = SparseVec::new();
        for (tuple, v) in &h.values {
            for (m, c) in self.nf(v).terms() {
                let i = basis
                    .iter()
                    .position(|(t, b)| t == tuple && b == m)
                    .unwrap_or_else(|| panic!("value {m:?} on {tuple:?} outside the slice"));
                out.insert(i, c.clone());
            }
        }
        out
    }

    /// Matrix of `d` from arity `q` to `q + 1` in weight `w`.
    pub fn d_matrix(&self, arity: usize, weight: i32) -> Result<ColumnMatrix> {
        let source = self.basis(arity, weight);
        let target = self.basis(arity + 1, weight);
        let mut columns = Vec::with_capacity(source.len());
        for i in 0..source.len() {
            let h = self.cochain_of(arity, &source, &crate::linalg::unit(i));
            columns.push(self.coordinates_of(&target, &self.d(&h)?));
        }
        Ok(ColumnMatrix::new(target.len(), columns))
    }

    /// Basis of the well-defined arity-`q` cochains of weight `w`.
    pub fn cochain_space(&self, arity: usize, weight: i32) -> Vec<SparseVec> {
        let basis = self.basis(arity, weight);
        if arity == 0 || self.syzygies.is_empty() {
            return (0..basis.len()).map(crate::linalg::unit).collect();
        }
        let mut index: BTreeMap<(usize, Vec<usize>, Monomial), usize> = BTreeMap::new();
        let mut columns = Vec::with_capacity(basis.len());
        for i in 0..basis.len() {
            let h = self.cochain_of(arity, &basis, &crate::linalg::unit(i));
            let mut col = SparseVec::new();
            for (s, rest, r) in self.syzygy_defects(&h) {
                for (m, c) in r.terms() {
                    let next = index.len();
                    let k = *index.entry((s, rest.clone(), m.clone())).or_insert(next);
                    col.insert(k, c.clone());
                }
            }
            columns.push(col);
        }
        ColumnMatrix::new(index.len(), columns).kernel()
    }

    /// `dim H^q` in weight `w` on well-defined cochains.
    pub fn cohomology_dimension(&self, arity: usize, weight: i32) -> Result<usize> {
        let space = self.cochain_space(arity, weight);
        let d = self.d_matrix(arity, weight)?;
        let mut im = Echelon::new();
        for v in &space {
            im.push(&d.apply(v));
        }
        let kernel = space.len() - im.rank();
        let incoming = if arity == 0 {
            0
        } else {
            let below = self.cochain_space(arity - 1, weight);
            let d = self.d_matrix(arity - 1, weight)?;
            let mut e = Echelon::new();
            for v in &below {
                e.push(&d.apply(v));
            }
            e.rank()
        };
        Ok(kernel - incoming)
    }

    /// Arity-0 cocycles of weight `w` as polynomials.
    pub fn invariants(&self, weight: i32) -> Result<Vec<SuperPolynomial>> {
        let basis = self.basis(0, weight);
        let kernel = self.d_matrix(0, weight)?.kernel();
        Ok(kernel
            .iter()
            .map(|v| self.cochain_of(0, &basis, v).value(self.table(), &[]))
            .collect())
    }

    /// `d ∘ d = 0` on well-defined cochains of arity `q` and weight `w`.
    pub fn squares_to_zero(&self, arity: usize, weight: i32) -> Result<bool> {
        for v in self.cochain_space(arity, weight) {
            let basis = self.basis(arity, weight);
            let h = self.cochain_of(arity, &basis, &v);
            if !self.d(&self.d(&h)?)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `ι(h) = Σ_I η^I h(φ_I)` in the BRST algebra.
    pub fn embed(&self, x: &BrstComplex<'_>, h: &RinehartCochain) -> Result<SuperPolynomial> {
        let t = x.resolution().table();
        let ghosts: Vec<_> = x.resolution().generators().iter().map(|g| g.ghost).collect();
        let mut out = SuperPolynomial::zero(t);
        for (tuple, v) in &h.values {
            let mut eta = SuperPolynomial::one(t);
            for &k in tuple {
                eta = &eta * &SuperPolynomial::var(t, ghosts[k]);
            }
            out = &out + &(&eta * &v.with_table(t)?);
        }
        Ok(out)
    }

    /// `π`: resolution-degree-0 part, normal-formed, read back as tuple
    /// values.
    pub fn project(&self, x: &BrstComplex<'_>, f: &SuperPolynomial, arity: usize) -> RinehartCochain {
        let res = x.resolution();
        let t = res.table();
        let index: BTreeMap<_, _> =
            res.generators().iter().enumerate().map(|(k, g)| (g.ghost, k)).collect();
        let mut raw: BTreeMap<Vec<usize>, SuperPolynomial> = BTreeMap::new();
        for (m, c) in f.terms() {
            let g = m.grading(t);
            if g.resolution != 0 || g.ghost != arity as i32 {
                continue;
            }
            let (neg, eta, base) = m.split(|v| t.get(v).is_ghost());
            let tuple: Vec<usize> = eta.odd().iter().map(|v| index[v]).collect();
            if tuple.len() != arity || !eta.even().is_empty() {
                continue;
            }
            let c = if neg { -c.clone() } else { c.clone() };
            raw.entry(tuple)
                .or_insert_with(|| SuperPolynomial::zero(self.table()))
                .add_term(base, c);
        }
        let mut h = RinehartCochain::zero(arity);
        for (tuple, v) in raw {
            h.set(tuple, self.nf(&v));
        }
        h
    }

    /// Compares the Rinehart complex with the BRST complex of the same
    /// constraints: cohomology dimensions in arities `0` and `1`, and `d`
    /// against the ghost-raising part of `∂` on every basis cochain.
    pub fn compare_e1(&self, x: &BrstComplex<'_>, max_weight: i32) -> Result<E1Comparison> {
        let regular = x.resolution().higher_generators().next().is_none() || self.is_regular_in(x);
        if !regular {
            return Ok(E1Comparison {
                identification_claimed: false,
                rows: Vec::new(),
                dimensions_match: false,
                d1_signs: Vec::new(),
                d1_matches: false,
            });
        }
        let mut rows = Vec::new();
        for arity in 0..=1usize {
            for w in 0..=max_weight {
                rows.push(E1Row {
                    arity,
                    weight: w,
                    rinehart: self.cohomology_dimension(arity, w)?,
                    brst: x.cohomology_slice(arity as i32, w)?.dimension,
                });
            }
        }
        let dimensions_match = rows.iter().all(|r| r.rinehart == r.brst);
        let mut d1_signs = Vec::new();
        let mut d1_matches = true;
        for arity in 0..=1usize {
            let mut found: Option<i32> = None;
            for w in 0..=max_weight {
                let basis = self.basis(arity, w);
                for i in 0..basis.len() {
                    let h = self.cochain_of(arity, &basis, &crate::linalg::unit(i));
                    let ours = self.d(&h)?;
                    let theirs = self.project(x, &x.differential(&self.embed(x, &h)?), arity + 1);
                    let s = if ours == theirs {
                        Some(1)
                    } else if negate(&ours) == theirs {
                        Some(-1)
                    } else {
                        None
                    };
                    match (s, found) {
                        (None, _) => d1_matches = false,
                        (Some(s), Some(f)) if s != f && !ours.is_zero() => d1_matches = false,
                        (Some(s), None) if !ours.is_zero() => found = Some(s),
                        _ => {}
                    }
                }
            }
            d1_signs.push(found);
        }
        Ok(E1Comparison { identification_claimed: true, rows, dimensions_match, d1_signs, d1_matches })
    }

    fn is_regular_in(&self, x: &BrstComplex<'_>) -> bool {
        x.resolution().higher_generators().all(|g| g.weight > x.window().max_weight + 2)
    }
}

fn negate(h: &RinehartCochain) -> RinehartCochain {
    RinehartCochain {
        arity: h.arity,
        values: h.values.iter().map(|(k, v)| (k.clone(), -v)).collect(),
    }
}
