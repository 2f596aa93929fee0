//! Koszul-Tate resolution of `P/I`.
//!
//! The resolution lives in `K = P ⊗ ΛΨ`, graded by resolution degree
//! `s <= 0`, weight and parity. Every such slice has a finite monomial basis,
//! so homology is plain rational linear algebra.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;
use serde::Serialize;

use crate::algebra::{Monomial, SuperPolynomial, VarId, VariableDecl, VariableTable};
use crate::error::{Error, Result};
use crate::ideal::IdealPresentation;
use crate::linalg::{quotient_basis, ColumnMatrix, SparseVec};
use crate::Rational;

/// A homogeneous piece of `K` (or of the ghost-extended algebra): resolution
/// or total degree, weight and parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SliceKey {
    pub degree: i32,
    pub weight: i32,
    pub odd: bool,
}

impl SliceKey {
    pub fn new(degree: i32, weight: i32, odd: bool) -> Self {
        SliceKey { degree, weight, odd }
    }
}

/// Ordered monomial basis of a slice.
#[derive(Debug, Clone, Default)]
pub struct Slice {
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Slice {
    pub fn from_basis(basis: Vec<Monomial>) -> Self {
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Slice { basis, index }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of `f`; terms outside the slice are a caller bug.
    pub fn coordinates(&self, f: &SuperPolynomial) -> SparseVec {
        f.terms()
            .map(|(m, c)| {
                let i = self.position(m).unwrap_or_else(|| panic!("monomial {m:?} not in slice"));
                (i, c.clone())
            })
            .collect()
    }

    pub fn polynomial(&self, table: &Arc<VariableTable>, v: &SparseVec) -> SuperPolynomial {
        SuperPolynomial::from_terms(table, v.iter().map(|(&i, c)| (self.basis[i].clone(), c.clone())))
    }
}

/// Enumerates monomials in `vars` (sorted ids) with `Σ cost = cost` and
/// `Σ weight = weight` and the given parity. Every variable must have
/// positive cost or positive weight, which keeps the search finite.
pub(crate) fn monomials_exact(
    table: &VariableTable,
    vars: &[VarId],
    cost: impl Fn(&VariableDecl) -> i32,
    cost_target: i32,
    weight_target: i32,
    odd: bool,
) -> Vec<Monomial> {
    let info: Vec<(VarId, i32, i32, bool)> = vars
        .iter()
        .map(|&v| {
            let d = table.get(v);
            (v, cost(d), d.weight, d.odd)
        })
        .collect();
    debug_assert!(info.iter().all(|&(_, c, w, _)| c >= 0 && w >= 0 && c + w > 0));
    let mut out = Vec::new();
    let mut even = Vec::new();
    let mut oddv = Vec::new();
    rec_exact(&info, cost_target, weight_target, odd, &mut even, &mut oddv, &mut out);
    out
}

fn rec_exact(
    info: &[(VarId, i32, i32, bool)],
    cost: i32,
    weight: i32,
    odd: bool,
    even: &mut Vec<(VarId, u32)>,
    oddv: &mut Vec<VarId>,
    out: &mut Vec<Monomial>,
) {
    let Some((&(v, c, w, is_odd), rest)) = info.split_first() else {
        if cost == 0 && weight == 0 && odd == (oddv.len() % 2 == 1) {
            out.push(Monomial::from_parts(even.clone(), oddv.clone()));
        }
        return;
    };
    let max_e = if is_odd {
        1
    } else {
        let by_cost = if c > 0 { cost / c } else { i32::MAX };
        let by_weight = if w > 0 { weight / w } else { i32::MAX };
        by_cost.min(by_weight)
    };
    for e in (0..=max_e).rev() {
        let (nc, nw) = (cost - e * c, weight - e * w);
        if nc < 0 || nw < 0 {
            continue;
        }
        if e > 0 {
            if is_odd {
                oddv.push(v);
            } else {
                even.push((v, e as u32));
            }
        }
        rec_exact(rest, nc, nw, odd, even, oddv, out);
        if e > 0 {
            if is_odd {
                oddv.pop();
            } else {
                even.pop();
            }
        }
    }
}

/// All monomials in `vars` (each of positive cost) with total cost at most
/// `cap`, grouped by `(cost, weight, parity)`.
pub(crate) fn monomials_capped(
    table: &VariableTable,
    vars: &[VarId],
    cost: impl Fn(&VariableDecl) -> i32,
    cap: i32,
) -> BTreeMap<(i32, i32, bool), Vec<Monomial>> {
    let info: Vec<(VarId, i32, i32, bool)> = vars
        .iter()
        .map(|&v| {
            let d = table.get(v);
            (v, cost(d), d.weight, d.odd)
        })
        .collect();
    debug_assert!(info.iter().all(|&(_, c, _, _)| c > 0));
    let mut out = BTreeMap::new();
    rec_capped(&info, cap, 0, 0, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

fn rec_capped(
    info: &[(VarId, i32, i32, bool)],
    left: i32,
    cost: i32,
    weight: i32,
    even: &mut Vec<(VarId, u32)>,
    oddv: &mut Vec<VarId>,
    out: &mut BTreeMap<(i32, i32, bool), Vec<Monomial>>,
) {
    let Some((&(v, c, w, is_odd), rest)) = info.split_first() else {
        out.entry((cost, weight, oddv.len() % 2 == 1))
            .or_default()
            .push(Monomial::from_parts(even.clone(), oddv.clone()));
        return;
    };
    let max_e = if is_odd { 1.min(left / c) } else { left / c };
    for e in 0..=max_e {
        if e > 0 {
            if is_odd {
                oddv.push(v);
            } else {
                even.push((v, e as u32));
            }
        }
        rec_capped(rest, left - e * c, cost + e * c, weight + e * w, even, oddv, out);
        if e > 0 {
            if is_odd {
                oddv.pop();
            } else {
                even.pop();
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionGenerator {
    #[serde(skip)]
    pub var: VarId,
    #[serde(skip)]
    pub ghost: VarId,
    pub name: String,
    pub ghost_name: String,
    pub degree: i32,
    pub weight: i32,
    pub odd: bool,
    #[serde(serialize_with = "crate::serialize_display")]
    pub delta: SuperPolynomial,
}

/// Truncation window: weights `0..=max_weight`, resolution degrees
/// `-depth..=-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResolutionWindow {
    pub max_weight: i32,
    pub depth: i32,
}

impl Default for ResolutionWindow {
    fn default() -> Self {
        ResolutionWindow { max_weight: 6, depth: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ResolutionStatus {
    /// Only the Koszul stage has been built.
    Unchecked,
    /// Acyclic in the window and no homology just below it.
    Complete,
    /// Acyclic in the window, but homology remains one degree below it, so
    /// the resolution continues past the window.
    Truncated { degree: i32, weight: i32, dimension: usize },
    /// Homology left inside the window.
    Incomplete { degree: i32, weight: i32, dimension: usize },
}

#[derive(Debug, Default)]
struct SliceCache(Mutex<HashMap<SliceKey, Arc<Slice>>>);

impl Clone for SliceCache {
    fn clone(&self) -> Self {
        SliceCache::default()
    }
}

/// The Koszul complex on the constraints, possibly enlarged by Tate
/// generators.
#[derive(Debug, Clone)]
pub struct TateResolution {
    table: Arc<VariableTable>,
    ideal: Arc<IdealPresentation>,
    generators: Vec<ResolutionGenerator>,
    images: HashMap<VarId, SuperPolynomial>,
    window: ResolutionWindow,
    status: ResolutionStatus,
    k_vars: Vec<VarId>,
    slices: SliceCache,
}

fn homogeneous_weight(f: &SuperPolynomial) -> Result<i32> {
    let mut ws = f.gradings().map(|g| g.weight);
    let Some(first) = ws.next() else { return Ok(0) };
    if ws.all(|w| w == first) {
        Ok(first)
    } else {
        Err(Error::NotHomogeneous(f.to_string()))
    }
}

/// Stage 0: one generator `P{i}` of degree -1 per constraint with
/// `δ(P{i}) = φ_i`, dual ghost `eta{i}`.
pub fn build_koszul(ideal: &IdealPresentation, window: ResolutionWindow) -> Result<TateResolution> {
    let mut table = (**ideal.table()).clone();
    let mut pending = Vec::new();
    for (i, phi) in ideal.generators().iter().enumerate() {
        let w = homogeneous_weight(phi)?;
        let (var, ghost) =
            table.add_resolution_pair(&format!("P{}", i + 1), &format!("eta{}", i + 1), -1, w)?;
        pending.push((var, ghost, -1, w, true, phi.clone()));
    }
    let mut r = TateResolution {
        table: Arc::new(VariableTable::new()),
        ideal: Arc::new(ideal.clone()),
        generators: Vec::new(),
        images: HashMap::new(),
        window,
        status: ResolutionStatus::Unchecked,
        k_vars: Vec::new(),
        slices: SliceCache::default(),
    };
    r.install(table, pending)?;
    Ok(r)
}

/// Koszul stage followed by Tate extension through the window.
pub fn build_resolution(ideal: &IdealPresentation, window: ResolutionWindow) -> Result<TateResolution> {
    build_koszul(ideal, window)?.tate_extend()
}

type Pending = (VarId, VarId, i32, i32, bool, SuperPolynomial);

impl TateResolution {
    fn install(&mut self, table: VariableTable, pending: Vec<Pending>) -> Result<()> {
        let table = Arc::new(table);
        for (var, ghost, degree, weight, odd, delta) in pending {
            let d = table.get(var);
            self.generators.push(ResolutionGenerator {
                var,
                ghost,
                name: d.name.clone(),
                ghost_name: table.get(ghost).name.clone(),
                degree,
                weight,
                odd,
                delta,
            });
        }
        for g in &mut self.generators {
            g.delta = g.delta.with_table(&table)?;
        }
        self.images = self.generators.iter().map(|g| (g.var, g.delta.clone())).collect();
        self.k_vars = table
            .ids()
            .filter(|&v| !table.get(v).is_ghost())
            .collect();
        self.table = table;
        self.slices = SliceCache::default();
        Ok(())
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn ideal(&self) -> &IdealPresentation {
        &self.ideal
    }

    pub fn generators(&self) -> &[ResolutionGenerator] {
        &self.generators
    }

    pub fn window(&self) -> ResolutionWindow {
        self.window
    }

    pub fn status(&self) -> &ResolutionStatus {
        &self.status
    }

    /// Generators of degree `<= -2`.
    pub fn higher_generators(&self) -> impl Iterator<Item = &ResolutionGenerator> {
        self.generators.iter().filter(|g| g.degree <= -2)
    }

    pub fn ghost_vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.generators.iter().map(|g| g.ghost).collect();
        v.sort_unstable();
        v
    }

    /// `δ` extended as an odd derivation; ghosts and base variables are
    /// annihilated.
    pub fn delta(&self, f: &SuperPolynomial) -> SuperPolynomial {
        let f = f.with_table(&self.table).expect("polynomial from a foreign table");
        f.apply_derivation(&self.images)
    }

    /// Monomial basis of `K` in the given slice, largest monomial first.
    pub fn k_slice(&self, key: SliceKey) -> Arc<Slice> {
        if let Some(s) = self.slices.0.lock().unwrap().get(&key) {
            return s.clone();
        }
        let basis = if key.degree > 0 || key.weight < 0 {
            Vec::new()
        } else {
            let mut b = monomials_exact(
                &self.table,
                &self.k_vars,
                |d| -d.resolution,
                -key.degree,
                key.weight,
                key.odd,
            );
            b.sort_by(|x, y| y.cmp(x));
            b
        };
        let slice = Arc::new(Slice::from_basis(basis));
        self.slices.0.lock().unwrap().insert(key, slice.clone());
        slice
    }

    /// Matrix of `δ` from `key` to `(degree + 1, weight, !odd)`.
    pub fn delta_matrix(&self, key: SliceKey) -> ColumnMatrix {
        let source = self.k_slice(key);
        if key.degree >= 0 {
            return ColumnMatrix::new(0, vec![SparseVec::new(); source.len()]);
        }
        let target = self.k_slice(SliceKey::new(key.degree + 1, key.weight, !key.odd));
        let columns = source
            .basis()
            .iter()
            .map(|m| {
                let f = SuperPolynomial::term(&self.table, m.clone(), Rational::one());
                target.coordinates(&self.delta(&f))
            })
            .collect();
        ColumnMatrix::new(target.len(), columns)
    }

    fn homology_vectors(&self, key: SliceKey) -> Vec<SparseVec> {
        let kernel = self.delta_matrix(key).kernel();
        let below = SliceKey::new(key.degree - 1, key.weight, !key.odd);
        let image = self.delta_matrix(below).columns;
        quotient_basis(&kernel, &image)
    }

    fn check_range(&self, degree: i32, weight: i32) -> Result<()> {
        if degree > 0 || degree < -self.window.depth - 1 || weight < 0 || weight > self.window.max_weight
        {
            return Err(Error::OutOfWindow { degree, weight });
        }
        Ok(())
    }

    /// Representatives of a basis of `H_s` in weight `w`, both parities,
    /// in echelon form.
    pub fn homology_slice(&self, degree: i32, weight: i32) -> Result<Vec<SuperPolynomial>> {
        self.check_range(degree, weight)?;
        let mut out = Vec::new();
        for odd in [false, true] {
            let key = SliceKey::new(degree, weight, odd);
            let slice = self.k_slice(key);
            for v in self.homology_vectors(key) {
                out.push(slice.polynomial(&self.table, &v));
            }
        }
        Ok(out)
    }

    /// Adjoins generators killing `H_s` for `s = -1, ..., -depth` and weights
    /// up to `max_weight`, then certifies the result.
    pub fn tate_extend(mut self) -> Result<TateResolution> {
        let ResolutionWindow { max_weight, depth } = self.window;
        for degree in (-depth..=-1).rev() {
            let mut counter = self.generators.iter().filter(|g| g.degree == degree - 1).count();
            for weight in 0..=max_weight {
                let mut table = (*self.table).clone();
                let mut pending = Vec::new();
                for odd in [false, true] {
                    let key = SliceKey::new(degree, weight, odd);
                    let slice = self.k_slice(key);
                    for v in self.homology_vectors(key) {
                        counter += 1;
                        let z = slice.polynomial(&self.table, &v);
                        let k = 1 - degree;
                        let (var, ghost) = table.add_resolution_pair_with_parity(
                            &format!("P{k}_{counter}"),
                            &format!("eta{k}_{counter}"),
                            degree - 1,
                            weight,
                            !odd,
                        )?;
                        pending.push((var, ghost, degree - 1, weight, !odd, z));
                    }
                }
                if !pending.is_empty() {
                    self.install(table, pending)?;
                }
            }
        }
        self.status = self.certify();
        Ok(self)
    }

    fn certify(&self) -> ResolutionStatus {
        let ResolutionWindow { max_weight, depth } = self.window;
        for degree in (-depth..=-1).rev() {
            for weight in 0..=max_weight {
                let dimension = self.homology_slice(degree, weight).map(|h| h.len()).unwrap_or(0);
                if dimension > 0 {
                    return ResolutionStatus::Incomplete { degree, weight, dimension };
                }
            }
        }
        let degree = -depth - 1;
        for weight in 0..=max_weight {
            let dimension = self.homology_slice(degree, weight).map(|h| h.len()).unwrap_or(0);
            if dimension > 0 {
                return ResolutionStatus::Truncated { degree, weight, dimension };
            }
        }
        ResolutionStatus::Complete
    }

    /// `δ(δ(g)) = 0` for every generator.
    pub fn delta_squared_vanishes(&self) -> bool {
        self.generators.iter().all(|g| self.delta(&g.delta).is_zero())
    }

    /// Every generator's image is a cycle of the right degree, weight and
    /// parity.
    pub fn images_are_cycles(&self) -> bool {
        self.generators.iter().all(|g| {
            self.delta(&g.delta).is_zero()
                && g.delta.terms().all(|(m, _)| {
                    let gr = m.grading(&self.table);
                    gr.resolution == g.degree + 1
                        && gr.ghost == 0
                        && gr.weight == g.weight
                        && m.is_odd() != g.odd
                })
        })
    }

    /// Dimension of `(P/I)` in weight `w`, odd base variables included.
    pub fn quotient_dimension(&self, weight: i32) -> usize {
        if weight < 0 {
            return 0;
        }
        self.ideal.quotient_monomials(weight as u32).len()
    }

    /// Rebuilds the resolution with a larger window.
    pub fn enlarged(&self, window: ResolutionWindow) -> Result<TateResolution> {
        build_resolution(&self.ideal, window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_polynomial;
    use crate::ideal::groebner_basis;

    fn pair_table() -> Arc<VariableTable> {
        // x = q1, y = p1
        let mut t = VariableTable::new();
        let x = t.add_base("x", false).unwrap();
        let y = t.add_base("y", false).unwrap();
        t.set_pairing(x, y, Rational::one()).unwrap();
        Arc::new(t)
    }

    fn resolve(t: &Arc<VariableTable>, gens: &[&str], window: ResolutionWindow) -> TateResolution {
        let gens: Vec<_> = gens.iter().map(|g| parse_polynomial(t, g).unwrap()).collect();
        let i = groebner_basis(t, &gens).unwrap();
        build_resolution(&i, window).unwrap()
    }

    #[test]
    fn koszul_of_a_regular_pair() {
        let t = pair_table();
        let r = resolve(&t, &["x", "y"], ResolutionWindow::default());
        assert_eq!(r.generators().len(), 2);
        assert_eq!(r.status(), &ResolutionStatus::Complete);
        let tt = r.table();
        let e = parse_polynomial(tt, "P1*P2").unwrap();
        assert_eq!(r.delta(&e), parse_polynomial(tt, "x*P2 - P1*y").unwrap());
    }

    #[test]
    fn redundant_pair_gets_an_even_generator() {
        let t = pair_table();
        let r = resolve(&t, &["x", "x"], ResolutionWindow::default());
        let higher: Vec<_> = r.higher_generators().collect();
        assert_eq!(higher.len(), 1);
        assert_eq!(higher[0].degree, -2);
        assert!(!higher[0].odd);
        let tt = r.table();
        let diff = parse_polynomial(tt, "P1 - P2").unwrap();
        assert!(higher[0].delta == diff || higher[0].delta == -&diff);
        assert!(r.delta_squared_vanishes());
        for w in 0..=6 {
            assert!(r.homology_slice(-1, w).unwrap().is_empty());
        }
    }

    #[test]
    fn homology_of_the_bare_koszul_complex() {
        let t = pair_table();
        let gens = vec![parse_polynomial(&t, "x").unwrap(), parse_polynomial(&t, "x").unwrap()];
        let i = groebner_basis(&t, &gens).unwrap();
        let k = build_koszul(&i, ResolutionWindow::default()).unwrap();
        assert_eq!(k.homology_slice(-1, 1).unwrap().len(), 1);
        assert!(matches!(k.homology_slice(-1, 99), Err(Error::OutOfWindow { .. })));
    }

    #[test]
    fn h0_matches_the_staircase() {
        let t = pair_table();
        let r = resolve(&t, &["x^2", "x*y"], ResolutionWindow { max_weight: 5, depth: 3 });
        assert!(r.higher_generators().any(|g| g.degree == -2));
        for w in 0..=5 {
            assert_eq!(r.homology_slice(0, w).unwrap().len(), r.quotient_dimension(w));
        }
        for s in -3..=-1 {
            for w in 0..=5 {
                assert!(r.homology_slice(s, w).unwrap().is_empty(), "H_{s} weight {w}");
            }
        }
        assert!(r.images_are_cycles());
    }

    #[test]
    fn extension_is_idempotent() {
        let t = pair_table();
        let r = resolve(&t, &["x", "x"], ResolutionWindow::default());
        let n = r.generators().len();
        let again = r.tate_extend().unwrap();
        assert_eq!(again.generators().len(), n);
    }

    #[test]
    fn regular_triple_needs_nothing() {
        let t = Arc::new(VariableTable::canonical(3));
        let r = resolve(&t, &["q1", "q2", "q3"], ResolutionWindow { max_weight: 4, depth: 3 });
        assert_eq!(r.generators().len(), 3);
        assert_eq!(r.status(), &ResolutionStatus::Complete);
    }

    #[test]
    fn inhomogeneous_constraints_are_rejected() {
        let t = pair_table();
        let i = groebner_basis(&t, &[parse_polynomial(&t, "x + x*y").unwrap()]).unwrap();
        assert!(matches!(
            build_koszul(&i, ResolutionWindow::default()),
            Err(Error::NotHomogeneous(_))
        ));
    }
}
