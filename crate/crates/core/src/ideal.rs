//! Ideals of the even base ring: Gröbner bases, normal forms in `P/I`,
//! first-class verification and the invariants of `P/I`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use crate::algebra::{bracket, Monomial, SuperPolynomial, VarId, VariableTable};
use crate::error::{Error, Result};
use crate::linalg::{ColumnMatrix, SparseVec};
use crate::Rational;

/// Constraint generators together with their reduced Gröbner basis under the
/// degree-lexicographic order. Each basis element remembers how it is
/// assembled from the generators.
#[derive(Debug, Clone)]
pub struct IdealPresentation {
    table: Arc<VariableTable>,
    generators: Vec<SuperPolynomial>,
    groebner: Vec<SuperPolynomial>,
    cofactors: Vec<Vec<SuperPolynomial>>,
}

/// An element of `P/I`, stored as its normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientElement {
    representative: SuperPolynomial,
}

impl QuotientElement {
    pub fn representative(&self) -> &SuperPolynomial {
        &self.representative
    }

    pub fn is_zero(&self) -> bool {
        self.representative.is_zero()
    }
}

/// `{g_i, g_j} = Σ_k coefficients[k] g_k`.
#[derive(Debug, Clone)]
pub struct StructureFunction {
    pub i: usize,
    pub j: usize,
    pub coefficients: Vec<SuperPolynomial>,
}

#[derive(Debug, Clone)]
pub struct FirstClassWitness {
    pub i: usize,
    pub j: usize,
    pub bracket: SuperPolynomial,
    pub remainder: SuperPolynomial,
}

#[derive(Debug, Clone)]
pub struct FirstClassReport {
    pub first_class: bool,
    pub structure: Vec<StructureFunction>,
    pub witness: Option<FirstClassWitness>,
}

impl FirstClassReport {
    pub fn into_result(self) -> Result<Vec<StructureFunction>> {
        match self.witness {
            None => Ok(self.structure),
            Some(w) => Err(Error::NotFirstClass {
                i: w.i,
                j: w.j,
                bracket: w.bracket.to_string(),
                remainder: w.remainder.to_string(),
            }),
        }
    }
}

/// Invariant classes of `P/I`, grouped by base degree.
#[derive(Debug, Clone)]
pub struct InvariantBasis {
    pub by_degree: Vec<Vec<QuotientElement>>,
}

impl InvariantBasis {
    pub fn dims(&self) -> Vec<usize> {
        self.by_degree.iter().map(Vec::len).collect()
    }

    pub fn all(&self) -> impl Iterator<Item = &QuotientElement> {
        self.by_degree.iter().flatten()
    }
}

#[derive(Debug, Clone)]
pub struct DivisionResult {
    pub remainder: SuperPolynomial,
    pub quotients: Vec<SuperPolynomial>,
}

fn check_base_even(table: &VariableTable, f: &SuperPolynomial) -> Result<()> {
    let ok = f.variables().iter().all(|&v| {
        let d = table.get(v);
        d.is_base() && !d.odd
    });
    if ok {
        Ok(())
    } else {
        Err(Error::NotBaseEven(f.to_string()))
    }
}

struct Entry {
    poly: SuperPolynomial,
    cof: Vec<SuperPolynomial>,
    sugar: u32,
}

fn lm(p: &SuperPolynomial) -> &Monomial {
    p.leading_term().expect("nonzero").0
}

fn total_degree(p: &SuperPolynomial) -> u32 {
    p.terms().map(|(m, _)| m.even_degree()).max().unwrap_or(0)
}

fn monic(entry: &mut Entry) {
    let lc = entry.poly.leading_term().unwrap().1.recip();
    entry.poly = entry.poly.scale(&lc);
    for c in &mut entry.cof {
        *c = c.scale(&lc);
    }
}

/// Full reduction of `f` by `basis`; leading terms are tried against the
/// basis in order.
fn divide(
    table: &Arc<VariableTable>,
    f: &SuperPolynomial,
    basis: &[&SuperPolynomial],
) -> DivisionResult {
    let mut rest = f.clone();
    let mut remainder = SuperPolynomial::zero(table);
    let mut quotients = vec![SuperPolynomial::zero(table); basis.len()];
    while let Some((m, c)) = rest.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        let hit = basis.iter().enumerate().find_map(|(k, g)| {
            let (gm, gc) = g.leading_term()?;
            m.div_even(gm).map(|q| (k, q, &c / gc))
        });
        match hit {
            Some((k, q, coeff)) => {
                let t = SuperPolynomial::term(table, q, coeff);
                rest = &rest - &(&t * basis[k]);
                quotients[k] = &quotients[k] + &t;
            }
            None => {
                remainder.add_term(m.clone(), c.clone());
                rest.add_term(m, -c);
            }
        }
    }
    DivisionResult { remainder, quotients }
}

/// Reduced Gröbner basis by Buchberger's algorithm with the sugar strategy.
pub fn groebner_basis(
    table: &Arc<VariableTable>,
    generators: &[SuperPolynomial],
) -> Result<IdealPresentation> {
    let gens: Vec<SuperPolynomial> = generators
        .iter()
        .map(|g| g.with_table(table))
        .collect::<Result<_>>()?;
    for g in &gens {
        check_base_even(table, g)?;
    }
    let m = gens.len();
    let zero = SuperPolynomial::zero(table);
    let mut basis: Vec<Entry> = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let mut cof = vec![zero.clone(); m];
        cof[k] = SuperPolynomial::one(table);
        let mut e = Entry { poly: g.clone(), cof, sugar: total_degree(g) };
        monic(&mut e);
        basis.push(e);
    }

    // (sugar, lcm, i, j)
    let mut pairs: Vec<(u32, Monomial, usize, usize)> = Vec::new();
    let make_pair = |basis: &[Entry], i: usize, j: usize| {
        let (a, b) = (lm(&basis[i].poly), lm(&basis[j].poly));
        let l = a.lcm_even(b);
        let sa = basis[i].sugar + l.even_degree() - a.even_degree();
        let sb = basis[j].sugar + l.even_degree() - b.even_degree();
        (sa.max(sb), l, i, j)
    };
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push(make_pair(&basis, i, j));
        }
    }

    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by(|&x, &y| {
                let (a, b) = (&pairs[x], &pairs[y]);
                a.0.cmp(&b.0)
                    .then_with(|| a.1.cmp(&b.1))
                    .then_with(|| (a.2, a.3).cmp(&(b.2, b.3)))
            })
            .unwrap();
        let (sugar, l, i, j) = pairs.swap_remove(best);
        let (a, b) = (lm(&basis[i].poly).clone(), lm(&basis[j].poly).clone());
        // coprime leading monomials: the S-polynomial reduces to zero
        if l.even_degree() == a.even_degree() + b.even_degree() {
            continue;
        }
        let ta = SuperPolynomial::term(table, l.div_even(&a).unwrap(), Rational::one());
        let tb = SuperPolynomial::term(table, l.div_even(&b).unwrap(), Rational::one());
        let s = &(&ta * &basis[i].poly) - &(&tb * &basis[j].poly);
        let mut cof: Vec<SuperPolynomial> = (0..m)
            .map(|k| &(&ta * &basis[i].cof[k]) - &(&tb * &basis[j].cof[k]))
            .collect();
        let refs: Vec<&SuperPolynomial> = basis.iter().map(|e| &e.poly).collect();
        let div = divide(table, &s, &refs);
        if div.remainder.is_zero() {
            continue;
        }
        for (q, e) in div.quotients.iter().zip(&basis) {
            if q.is_zero() {
                continue;
            }
            for k in 0..m {
                cof[k] = &cof[k] - &(q * &e.cof[k]);
            }
        }
        let mut e = Entry { poly: div.remainder, cof, sugar };
        monic(&mut e);
        basis.push(e);
        let n = basis.len() - 1;
        for i in 0..n {
            pairs.push(make_pair(&basis, i, n));
        }
    }

    // minimalise: drop elements whose leading monomial is divisible by another's
    let mut keep: Vec<Entry> = Vec::new();
    for (k, e) in basis.iter().enumerate() {
        let lk = lm(&e.poly);
        let redundant = basis.iter().enumerate().any(|(o, f)| {
            let lo = lm(&f.poly);
            o != k && lk.div_even(lo).is_some() && (lo != lk || o < k)
        });
        if !redundant {
            keep.push(Entry { poly: e.poly.clone(), cof: e.cof.clone(), sugar: e.sugar });
        }
    }
    // inter-reduce the tails
    for k in 0..keep.len() {
        let others: Vec<&SuperPolynomial> = keep
            .iter()
            .enumerate()
            .filter(|&(o, _)| o != k)
            .map(|(_, e)| &e.poly)
            .collect();
        let div = divide(table, &keep[k].poly, &others);
        let mut cof = keep[k].cof.clone();
        let idx: Vec<usize> = (0..keep.len()).filter(|&o| o != k).collect();
        for (q, &o) in div.quotients.iter().zip(&idx) {
            if q.is_zero() {
                continue;
            }
            for c in 0..m {
                cof[c] = &cof[c] - &(q * &keep[o].cof[c]);
            }
        }
        keep[k].poly = div.remainder;
        keep[k].cof = cof;
        monic(&mut keep[k]);
    }
    keep.sort_by(|a, b| lm(&a.poly).cmp(lm(&b.poly)));

    Ok(IdealPresentation {
        table: table.clone(),
        generators: gens,
        groebner: keep.iter().map(|e| e.poly.clone()).collect(),
        cofactors: keep.into_iter().map(|e| e.cof).collect(),
    })
}

impl IdealPresentation {
    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn generators(&self) -> &[SuperPolynomial] {
        &self.generators
    }

    pub fn groebner(&self) -> &[SuperPolynomial] {
        &self.groebner
    }

    pub fn is_unit(&self) -> bool {
        self.groebner.iter().any(|g| lm(g).is_one())
    }

    fn reduce_base(&self, f: &SuperPolynomial) -> DivisionResult {
        let refs: Vec<&SuperPolynomial> = self.groebner.iter().collect();
        divide(&self.table, f, &refs)
    }

    /// Normal form; ghost and resolution factors ride along untouched and
    /// only the base-variable content of each term is reduced.
    pub fn normal_form(&self, f: &SuperPolynomial) -> QuotientElement {
        let table = f.table().clone();
        let mut groups: BTreeMap<Monomial, SuperPolynomial> = BTreeMap::new();
        for (m, c) in f.terms() {
            let (_, base, rest) = m.split(|v| table.get(v).is_base() && !table.get(v).odd);
            groups
                .entry(rest)
                .or_insert_with(|| SuperPolynomial::zero(&self.table))
                .add_term(base, c.clone());
        }
        let mut out = SuperPolynomial::zero(&table);
        for (rest, base) in groups {
            let r = self.reduce_base(&base).remainder;
            for (m, c) in r.terms() {
                let (neg, prod) = m.mul(&rest).expect("base part is even");
                debug_assert!(!neg);
                out.add_term(prod, c.clone());
            }
        }
        QuotientElement { representative: out }
    }

    pub fn is_member(&self, f: &SuperPolynomial) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Coefficients `c` with `f = Σ c_k g_k` over the user generators, when
    /// `f` (base-only) lies in the ideal.
    pub fn express(&self, f: &SuperPolynomial) -> Option<Vec<SuperPolynomial>> {
        let div = self.reduce_base(f);
        if !div.remainder.is_zero() {
            return None;
        }
        let m = self.generators.len();
        let mut out = vec![SuperPolynomial::zero(&self.table); m];
        for (q, cof) in div.quotients.iter().zip(&self.cofactors) {
            if q.is_zero() {
                continue;
            }
            for k in 0..m {
                out[k] = &out[k] + &(q * &cof[k]);
            }
        }
        Some(out)
    }

    /// Standard monomials of the given degree, in decreasing order.
    pub fn staircase(&self, degree: u32) -> Vec<Monomial> {
        let vars = self.table.even_base_vars();
        Monomial::all_of_degree(&vars, degree)
            .into_iter()
            .filter(|m| self.groebner.iter().all(|g| m.div_even(lm(g)).is_none()))
            .collect()
    }

    /// True if the even base part of `m` is a standard monomial.
    pub fn is_standard(&self, m: &Monomial) -> bool {
        let (_, base, _) = m.split(|v| {
            let d = self.table.get(v);
            d.is_base() && !d.odd
        });
        self.groebner.iter().all(|g| base.div_even(lm(g)).is_none())
    }

    /// Monomial basis of `P/I` in the given base degree: standard even
    /// monomials times products of odd base variables.
    pub fn quotient_monomials(&self, degree: u32) -> Vec<Monomial> {
        let odd: Vec<VarId> =
            self.table.base_vars().into_iter().filter(|&v| self.table.get(v).odd).collect();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << odd.len()) {
            let picked: Vec<VarId> =
                (0..odd.len()).filter(|&i| mask & (1 << i) != 0).map(|i| odd[i]).collect();
            let j = picked.len() as u32;
            if j > degree {
                continue;
            }
            let odd_part = Monomial::from_parts(Vec::new(), picked);
            for m in self.staircase(degree - j) {
                out.push(m.mul(&odd_part).expect("disjoint factors").1);
            }
        }
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    /// Upper bound on the weights in which the syzygies of the generators
    /// are generated: the largest leading-monomial lcm over pairs of Gröbner
    /// basis elements, or the largest generator weight.
    pub fn syzygy_weight_bound(&self) -> i32 {
        let leads: Vec<&Monomial> = self.groebner.iter().filter_map(|g| g.leading_term()).map(|t| t.0).collect();
        let mut bound = self.generators.iter().filter_map(Self::homogeneous_degree).max().unwrap_or(0) as i32;
        for (k, a) in leads.iter().enumerate() {
            for b in &leads[k + 1..] {
                bound = bound.max(a.lcm_even(b).even_degree() as i32);
            }
        }
        bound
    }

    /// Checks `{g_i, g_j} ∈ I` for every pair of generators.
    pub fn is_first_class(&self) -> FirstClassReport {
        let mut structure = Vec::new();
        let n = self.generators.len();
        for i in 0..n {
            for j in i + 1..n {
                let b = bracket(&self.generators[i], &self.generators[j]);
                match self.express(&b) {
                    Some(coefficients) => structure.push(StructureFunction { i, j, coefficients }),
                    None => {
                        let remainder = self.normal_form(&b).representative;
                        return FirstClassReport {
                            first_class: false,
                            structure,
                            witness: Some(FirstClassWitness { i, j, bracket: b, remainder }),
                        };
                    }
                }
            }
        }
        FirstClassReport { first_class: true, structure, witness: None }
    }

    /// Basis of the classes `[g] ∈ P/I` of degree `<= max_degree` with
    /// `{g_i, g} ∈ I` for every generator, one linear solve per degree.
    pub fn invariant_basis(&self, max_degree: u32) -> Result<InvariantBasis> {
        self.is_first_class().into_result()?;
        let mut by_degree = Vec::new();
        for d in 0..=max_degree {
            let stairs = self.quotient_monomials(d);
            let mut index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
            let mut columns = Vec::with_capacity(stairs.len());
            for m in &stairs {
                let g = SuperPolynomial::term(&self.table, m.clone(), Rational::one());
                let mut col = SparseVec::new();
                for (k, gen) in self.generators.iter().enumerate() {
                    let nf = self.normal_form(&bracket(gen, &g));
                    for (mono, c) in nf.representative.terms() {
                        let next = index.len();
                        let idx = *index.entry((k, mono.clone())).or_insert(next);
                        col.insert(idx, c.clone());
                    }
                }
                columns.push(col);
            }
            let kernel = ColumnMatrix::new(index.len(), columns).kernel();
            let classes = kernel
                .into_iter()
                .map(|v| {
                    let rep = SuperPolynomial::from_terms(
                        &self.table,
                        v.into_iter().map(|(i, c)| (stairs[i].clone(), c)),
                    );
                    QuotientElement { representative: rep }
                })
                .collect();
            by_degree.push(classes);
        }
        Ok(by_degree).map(|by_degree| InvariantBasis { by_degree })
    }

    /// Coordinates of a degree-`d` normal form over `quotient_monomials(d)`.
    pub fn coordinates(&self, f: &SuperPolynomial, degree: u32) -> SparseVec {
        let stairs = self.quotient_monomials(degree);
        let nf = self.normal_form(f);
        nf.representative
            .terms()
            .filter_map(|(m, c)| stairs.iter().position(|s| s == m).map(|i| (i, c.clone())))
            .collect()
    }

    pub fn degree_of(&self, v: VarId) -> i32 {
        self.table.get(v).weight
    }

    /// Degree if every term of `f` has the same base degree.
    pub fn homogeneous_degree(f: &SuperPolynomial) -> Option<u32> {
        let mut degs = f.terms().map(|(m, _)| m.even_degree());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_polynomial;

    fn setup(n: usize) -> Arc<VariableTable> {
        Arc::new(VariableTable::canonical(n))
    }

    fn ideal(t: &Arc<VariableTable>, gens: &[&str]) -> IdealPresentation {
        let gens: Vec<_> = gens.iter().map(|g| parse_polynomial(t, g).unwrap()).collect();
        groebner_basis(t, &gens).unwrap()
    }

    fn p(t: &Arc<VariableTable>, s: &str) -> SuperPolynomial {
        parse_polynomial(t, s).unwrap()
    }

    #[test]
    fn syzygy_weights() {
        let t = setup(2);
        assert_eq!(ideal(&t, &["q1*p2 - q2*p1"]).syzygy_weight_bound(), 2);
        assert_eq!(ideal(&t, &["q1", "q2"]).syzygy_weight_bound(), 2);
        assert_eq!(ideal(&t, &["q1^2", "q1*q2"]).syzygy_weight_bound(), 3);
        let t = setup(3);
        let so3 = ideal(&t, &["q2*p3 - q3*p2", "q3*p1 - q1*p3", "q1*p2 - q2*p1"]);
        assert!(so3.syzygy_weight_bound() >= 3);
    }

    #[test]
    fn already_reduced() {
        let t = setup(2);
        let i = ideal(&t, &["q1", "q2"]);
        assert_eq!(i.groebner().len(), 2);
        let i = ideal(&t, &["q1", "q1"]);
        assert_eq!(i.groebner(), &[p(&t, "q1")]);
        let i = ideal(&t, &["q1*p2 - q2*p1"]);
        assert_eq!(i.groebner(), &[p(&t, "q1*p2 - q2*p1")]);
    }

    #[test]
    fn normal_forms() {
        let t = setup(2);
        let i = ideal(&t, &["q1"]);
        assert!(i.normal_form(&p(&t, "q1^2 + q1*q2")).is_zero());
        assert_eq!(i.normal_form(&p(&t, "q2 + q1")).representative(), &p(&t, "q2"));
        let l = ideal(&t, &["q1*p2 - q2*p1"]);
        let f = p(&t, "(q1*p2 - q2*p1)*q1 + p1");
        assert_eq!(l.normal_form(&f).representative(), &p(&t, "p1"));
    }

    #[test]
    fn membership() {
        let t = setup(2);
        let i = ideal(&t, &["q1"]);
        assert!(i.is_member(&p(&t, "q1*q2")));
        assert!(!i.is_member(&p(&t, "1")));
    }

    #[test]
    fn non_base_generators_rejected() {
        let mut t = VariableTable::canonical(1);
        t.add_base("th", true).unwrap();
        let t = Arc::new(t);
        assert!(matches!(
            groebner_basis(&t, &[p(&t, "th")]),
            Err(Error::NotBaseEven(_))
        ));
    }

    #[test]
    fn second_class_pair() {
        let t = setup(1);
        let i = ideal(&t, &["q1", "p1"]);
        let r = i.is_first_class();
        assert!(!r.first_class);
        let w = r.witness.unwrap();
        assert_eq!(w.bracket, SuperPolynomial::one(&t));
        assert!(i.invariant_basis(1).is_err());
    }

    #[test]
    fn first_class_is_basis_independent() {
        let t = setup(2);
        assert!(ideal(&t, &["q1", "q2"]).is_first_class().first_class);
        assert!(ideal(&t, &["q1", "q1 + q2"]).is_first_class().first_class);
        assert!(ideal(&t, &["q2", "q1"]).is_first_class().first_class);
    }

    #[test]
    fn invariants_of_a_coordinate_hyperplane() {
        let t = setup(1);
        let i = ideal(&t, &["q1"]);
        let inv = i.invariant_basis(1).unwrap();
        assert_eq!(inv.dims(), vec![1, 0]);
    }

    #[test]
    fn invariants_of_the_unit_ideal() {
        let t = setup(1);
        let i = ideal(&t, &["1"]);
        assert!(i.is_unit());
        assert_eq!(i.invariant_basis(2).unwrap().dims(), vec![0, 0, 0]);
    }

    #[test]
    fn angular_momentum_invariants() {
        let t = setup(2);
        let i = ideal(&t, &["q1*p2 - q2*p1"]);
        let inv = i.invariant_basis(2).unwrap();
        assert_eq!(inv.dims(), vec![1, 0, 3]);
        for g in ["q1^2 + q2^2", "p1^2 + p2^2", "q1*p1 + q2*p2"] {
            let g = p(&t, g);
            for gen in i.generators() {
                assert!(i.is_member(&bracket(gen, &g)));
            }
            // g lies in the span of the returned degree-2 classes
            let mut e = crate::linalg::Echelon::new();
            for c in &inv.by_degree[2] {
                e.push(&i.coordinates(c.representative(), 2));
            }
            assert!(e.contains(&i.coordinates(&g, 2)));
        }
    }

    #[test]
    fn structure_functions_reproduce_brackets() {
        let t = setup(3);
        let i = ideal(&t, &["q2*p3 - q3*p2", "q3*p1 - q1*p3", "q1*p2 - q2*p1"]);
        let r = i.is_first_class();
        assert!(r.first_class);
        for sf in &r.structure {
            let mut sum = SuperPolynomial::zero(&t);
            for (c, g) in sf.coefficients.iter().zip(i.generators()) {
                sum = &sum + &(c * g);
            }
            assert_eq!(sum, bracket(&i.generators()[sf.i], &i.generators()[sf.j]));
        }
        // L3 lies in the ideal
        assert!(i.is_member(&p(&t, "q1*p2 - q2*p1")));
    }
}
