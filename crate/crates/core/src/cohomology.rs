//! Cohomology of `∂ = {R, ·}` on `X = (ΛΨ)* ⊗ P ⊗ ΛΨ`.
//!
//! Slices are keyed by total degree `i`, weight and parity. Ghost monomials
//! are capped at ghost degree `G`; dropping everything above the cap is a
//! quotient by a subcomplex, and for `G >= 1` it leaves `H^i` untouched in
//! degrees `i <= 0` provided the resolution is acyclic far enough down.
//! With `G >= 2`, `H^1` agrees as well once the resolution holds every
//! generator of degree `-2`, whatever its weight; see [`required_window`].

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;
use serde::Serialize;

use crate::algebra::{bracket, Monomial, SuperPolynomial};
use crate::brst::BrstState;
use crate::error::{Error, Result};
use crate::homotopy::HomotopyOperator;
use crate::ideal::{IdealPresentation, InvariantBasis};
use crate::koszul_tate::{
    build_resolution, monomials_capped, ResolutionWindow, Slice, SliceKey, TateResolution,
};
use crate::linalg::{quotient_basis, ColumnMatrix, Echelon, SparseVec};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CohomologyWindow {
    pub max_weight: i32,
    pub ghost_cap: i32,
}

impl Default for CohomologyWindow {
    fn default() -> Self {
        CohomologyWindow { max_weight: 2, ghost_cap: 4 }
    }
}

type GhostGroups = BTreeMap<(i32, i32, bool), Vec<Monomial>>;

fn ghost_groups(res: &TateResolution, cap: i32) -> GhostGroups {
    let table = res.table();
    let ghosts: Vec<_> =
        res.ghost_vars().into_iter().filter(|&v| table.get(v).ghost <= cap).collect();
    monomials_capped(table, &ghosts, |d| d.ghost, cap)
}

/// Smallest resolution window whose `K` slices cover every `X` slice of
/// weight `<= max_weight` and total degree `>= -1` with ghost degree `<= cap`.
/// With `cap >= 2` it also reaches every degree `-2` generator, whose ghosts
/// enter `H^1` in every weight.
pub fn required_window(res: &TateResolution, w: CohomologyWindow) -> ResolutionWindow {
    let lightest = ghost_groups(res, w.ghost_cap).keys().map(|k| k.1).min().unwrap_or(0);
    let mut max_weight = w.max_weight - lightest.min(0);
    if w.ghost_cap >= 2 {
        max_weight = max_weight.max(res.ideal().syzygy_weight_bound());
    }
    ResolutionWindow { max_weight, depth: w.ghost_cap + 1 }
}

/// Builds a resolution large enough for the cohomology window, growing it
/// until new generators stop lowering the ghost weights in range.
pub fn fit_resolution(
    ideal: &IdealPresentation,
    start: ResolutionWindow,
    w: CohomologyWindow,
) -> Result<TateResolution> {
    let mut window = start;
    loop {
        let res = build_resolution(ideal, window)?;
        let need = required_window(&res, w);
        if need.max_weight <= window.max_weight && need.depth <= window.depth {
            return Ok(res);
        }
        window = ResolutionWindow {
            max_weight: window.max_weight.max(need.max_weight),
            depth: window.depth.max(need.depth),
        };
    }
}

/// The capped complex `(X, ∂)` for a fixed generator.
#[derive(Debug)]
pub struct BrstComplex<'a> {
    resolution: &'a TateResolution,
    state: &'a BrstState,
    window: CohomologyWindow,
    ghosts: GhostGroups,
    slices: Mutex<HashMap<SliceKey, Arc<Slice>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologySlice {
    pub total: i32,
    pub weight: i32,
    pub dimension: usize,
    pub cocycles: usize,
    pub coboundaries: usize,
    #[serde(serialize_with = "serialize_all")]
    pub representatives: Vec<SuperPolynomial>,
}

fn serialize_all<S: serde::Serializer>(
    v: &[SuperPolynomial],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.to_string()))
}

/// An `H⁰` class written as `normal_form + ∂(correction) + tail`, where
/// `tail` carries no pure-`P` term.
#[derive(Debug, Clone, Serialize)]
pub struct NoGhostWitness {
    pub weight: i32,
    #[serde(serialize_with = "crate::serialize_display")]
    pub representative: SuperPolynomial,
    #[serde(serialize_with = "crate::serialize_display")]
    pub normal_form: SuperPolynomial,
    #[serde(serialize_with = "crate::serialize_display")]
    pub correction: SuperPolynomial,
    #[serde(serialize_with = "crate::serialize_display")]
    pub tail: SuperPolynomial,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoGhostReport {
    pub holds: bool,
    /// `(weight, classes, rank of their pure parts in P/I)`.
    pub ranks: Vec<(i32, usize, usize)>,
    pub witnesses: Vec<NoGhostWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct H0Comparison {
    pub weight: i32,
    pub brst_dimension: usize,
    pub invariant_dimension: usize,
    pub equal: bool,
    /// Each BRST class in terms of the invariant basis, `None` if outside
    /// its span.
    pub correspondence: Vec<Option<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct E1Slice {
    pub total: i32,
    pub weight: i32,
    pub dimension: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologyReport {
    pub window: CohomologyWindow,
    pub resolution_window: ResolutionWindow,
    pub slices: Vec<CohomologySlice>,
    pub no_ghost: Option<NoGhostReport>,
}

impl<'a> BrstComplex<'a> {
    pub fn new(resolution: &'a TateResolution, state: &'a BrstState, window: CohomologyWindow) -> Self {
        BrstComplex {
            resolution,
            state,
            window,
            ghosts: ghost_groups(resolution, window.ghost_cap),
            slices: Mutex::new(HashMap::new()),
        }
    }

    pub fn window(&self) -> CohomologyWindow {
        self.window
    }

    pub fn resolution(&self) -> &'a TateResolution {
        self.resolution
    }

    pub fn state(&self) -> &'a BrstState {
        self.state
    }

    fn priority(&self, m: &Monomial) -> (u8, Reverse<u32>, Reverse<Monomial>) {
        let g = m.grading(self.resolution.table());
        let class = if g.form > 0 {
            1
        } else if self.resolution.ideal().is_standard(m) {
            2
        } else {
            0
        };
        (class, Reverse(g.form), Reverse(m.clone()))
    }

    /// Monomial basis of the capped `X` slice. Non-standard pure monomials
    /// come first, then ghost-bearing ones by decreasing form count, then
    /// standard pure monomials, so reduced representatives favour the last.
    pub fn x_slice(&self, key: SliceKey) -> Arc<Slice> {
        if let Some(s) = self.slices.lock().unwrap().get(&key) {
            return s.clone();
        }
        let mut basis = Vec::new();
        for (&(r, wg, odd), gms) in &self.ghosts {
            let k = self
                .resolution
                .k_slice(SliceKey::new(key.degree - r, key.weight - wg, key.odd ^ odd));
            for g in gms {
                for m in k.basis() {
                    basis.push(g.mul(m).expect("ghosts and K share no variable").1);
                }
            }
        }
        basis.sort_by_cached_key(|m| self.priority(m));
        let slice = Arc::new(Slice::from_basis(basis));
        self.slices.lock().unwrap().insert(key, slice.clone());
        slice
    }

    fn check_reach(&self, total: i32) -> Result<i32> {
        let needed = self.window.ghost_cap - total.min(0) + 1;
        let certified = self.state.exact_below();
        if certified < needed {
            return Err(Error::BeyondReach { total, needed, certified });
        }
        Ok(needed)
    }

    fn keep(&self, f: &SuperPolynomial) -> SuperPolynomial {
        let t = self.resolution.table();
        f.filter(|m| m.grading(t).ghost <= self.window.ghost_cap)
    }

    /// `∂x` with terms above the ghost cap dropped.
    pub fn differential(&self, x: &SuperPolynomial) -> SuperPolynomial {
        self.keep(&bracket(&self.state.generator, x))
    }

    /// Matrix of `∂` from `key` to `(degree + 1, weight, !odd)`.
    pub fn differential_matrix(&self, key: SliceKey) -> Result<ColumnMatrix> {
        let needed = self.check_reach(key.degree)?;
        let t = self.resolution.table();
        let r = self.state.generator.filter(|m| m.grading(t).ghost < needed);
        let source = self.x_slice(key);
        let target = self.x_slice(SliceKey::new(key.degree + 1, key.weight, !key.odd));
        let columns = source
            .basis()
            .iter()
            .map(|m| {
                let x = SuperPolynomial::term(t, m.clone(), Rational::one());
                target.coordinates(&self.keep(&bracket(&r, &x)))
            })
            .collect();
        Ok(ColumnMatrix::new(target.len(), columns))
    }

    /// Matrix of `1 ⊗ δ` from `key` to `(degree + 1, weight, !odd)`.
    pub fn koszul_matrix(&self, key: SliceKey) -> ColumnMatrix {
        let t = self.resolution.table();
        let source = self.x_slice(key);
        let target = self.x_slice(SliceKey::new(key.degree + 1, key.weight, !key.odd));
        let columns = source
            .basis()
            .iter()
            .map(|m| {
                let x = SuperPolynomial::term(t, m.clone(), Rational::one());
                target.coordinates(&self.resolution.delta(&x))
            })
            .collect();
        ColumnMatrix::new(target.len(), columns)
    }

    fn slice_with(
        &self,
        total: i32,
        weight: i32,
        matrix: impl Fn(SliceKey) -> Result<ColumnMatrix>,
    ) -> Result<CohomologySlice> {
        let t = self.resolution.table();
        let mut out = CohomologySlice {
            total,
            weight,
            dimension: 0,
            cocycles: 0,
            coboundaries: 0,
            representatives: Vec::new(),
        };
        for odd in [false, true] {
            let key = SliceKey::new(total, weight, odd);
            let slice = self.x_slice(key);
            if slice.is_empty() {
                continue;
            }
            let kernel = matrix(key)?.kernel();
            let image = matrix(SliceKey::new(total - 1, weight, !odd))?.columns;
            let mut ech = Echelon::new();
            for v in &image {
                ech.push(v);
            }
            let reps = quotient_basis(&kernel, &image);
            out.cocycles += kernel.len();
            out.coboundaries += ech.rank();
            out.dimension += reps.len();
            out.representatives.extend(reps.iter().map(|v| slice.polynomial(t, v)));
        }
        Ok(out)
    }

    /// `H^i` in the given weight, both parities, with echelon representatives.
    pub fn cohomology_slice(&self, total: i32, weight: i32) -> Result<CohomologySlice> {
        self.slice_with(total, weight, |k| self.differential_matrix(k))
    }

    /// Cohomology of `1 ⊗ δ` alone, the first page of the ghost-degree
    /// spectral sequence.
    pub fn e1_slice(&self, total: i32, weight: i32) -> E1Slice {
        let s = self
            .slice_with(total, weight, |k| Ok(self.koszul_matrix(k)))
            .expect("the Koszul part needs no generator");
        let expected = self
            .ghosts
            .iter()
            .filter(|(k, _)| k.0 == total)
            .map(|(k, gms)| gms.len() * self.resolution.quotient_dimension(weight - k.1))
            .sum();
        E1Slice { total, weight, dimension: s.dimension, expected }
    }

    /// `∂ ∘ ∂ = 0` from `(total, weight)` in both parities.
    pub fn squares_to_zero(&self, total: i32, weight: i32) -> Result<bool> {
        for odd in [false, true] {
            let first = self.differential_matrix(SliceKey::new(total, weight, odd))?;
            let second = self.differential_matrix(SliceKey::new(total + 1, weight, !odd))?;
            if !second.compose(&first).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every `H⁰` class through `max_weight` has a pure-`P` representative,
    /// and distinct classes stay independent in `P/I`.
    pub fn no_ghost_check(&self, s: &HomotopyOperator, max_weight: i32) -> Result<NoGhostReport> {
        let t = self.resolution.table();
        let ideal = self.resolution.ideal();
        let mut report = NoGhostReport { holds: true, ranks: Vec::new(), witnesses: Vec::new() };
        for w in 0..=max_weight {
            let h = self.cohomology_slice(0, w)?;
            let mut ech = Echelon::new();
            for x in h.representatives {
                let pure = x.filter(|m| m.grading(t).form == 0);
                let nf = ideal.normal_form(&pure).representative().clone();
                let correction = s.apply(&(&pure - &nf))?;
                let tail = &(&x - &nf) - &self.differential(&correction);
                if !tail.filter(|m| m.grading(t).form == 0).is_zero() {
                    report.holds = false;
                }
                ech.push(&ideal.coordinates(&nf, w as u32));
                report.witnesses.push(NoGhostWitness {
                    weight: w,
                    representative: x,
                    normal_form: nf,
                    correction,
                    tail,
                });
            }
            if ech.rank() < h.dimension {
                report.holds = false;
            }
            report.ranks.push((w, h.dimension, ech.rank()));
        }
        Ok(report)
    }

    /// Compares `H⁰` with the invariant classes of `P/I`, weight by weight,
    /// through the pure parts of the BRST representatives.
    pub fn compare_h0(&self, invariants: &InvariantBasis, max_weight: i32) -> Result<Vec<H0Comparison>> {
        let t = self.resolution.table();
        let ideal = self.resolution.ideal();
        let mut out = Vec::new();
        for w in 0..=max_weight {
            let h = self.cohomology_slice(0, w)?;
            let inv: &[_] = invariants.by_degree.get(w as usize).map(|v| &v[..]).unwrap_or(&[]);
            let mut oracle = Echelon::new();
            for (k, q) in inv.iter().enumerate() {
                oracle.insert(&ideal.coordinates(q.representative(), w as u32), crate::linalg::unit(k));
            }
            let mut ours = Echelon::new();
            let mut correspondence = Vec::new();
            for x in &h.representatives {
                let pure = x.filter(|m| m.grading(t).form == 0);
                let v = ideal.coordinates(&pure, w as u32);
                ours.push(&v);
                let (rem, tag) = oracle.reduce(&v);
                correspondence.push(rem.is_empty().then(|| describe(&tag)));
            }
            let equal = h.dimension == inv.len()
                && ours.rank() == h.dimension
                && oracle.rank() == inv.len()
                && correspondence.iter().all(Option::is_some);
            out.push(H0Comparison {
                weight: w,
                brst_dimension: h.dimension,
                invariant_dimension: inv.len(),
                equal,
                correspondence,
            });
        }
        Ok(out)
    }

    /// Cohomology report over total degrees `totals` and weights
    /// `0..=max_weight`, with the no-ghost check when `s` is given.
    pub fn report(
        &self,
        totals: impl IntoIterator<Item = i32>,
        s: Option<&HomotopyOperator>,
    ) -> Result<CohomologyReport> {
        let mut slices = Vec::new();
        for i in totals {
            for w in 0..=self.window.max_weight {
                slices.push(self.cohomology_slice(i, w)?);
            }
        }
        let no_ghost = s.map(|s| self.no_ghost_check(s, self.window.max_weight)).transpose()?;
        Ok(CohomologyReport {
            window: self.window,
            resolution_window: self.resolution.window(),
            slices,
            no_ghost,
        })
    }
}

fn describe(tag: &SparseVec) -> String {
    if tag.is_empty() {
        return "0".into();
    }
    tag.iter().map(|(k, c)| format!("{c}*I{k}")).collect::<Vec<_>>().join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, VariableTable};
    use crate::brst::build_generator_adaptive;
    use crate::homotopy::PivotOrder;
    use crate::ideal::groebner_basis;

    fn ideal(table: VariableTable, gens: &[&str]) -> IdealPresentation {
        let t = Arc::new(table);
        let gens: Vec<_> = gens.iter().map(|g| parse_polynomial(&t, g).unwrap()).collect();
        groebner_basis(&t, &gens).unwrap()
    }

    fn xy() -> VariableTable {
        let mut t = VariableTable::new();
        let x = t.add_base("x", false).unwrap();
        let y = t.add_base("y", false).unwrap();
        t.set_pairing(x, y, Rational::one()).unwrap();
        t
    }

    fn dims(i: &IdealPresentation, w: CohomologyWindow, max_order: usize) -> (Vec<usize>, Vec<usize>, bool) {
        let res = fit_resolution(i, ResolutionWindow { max_weight: 2, depth: 2 }, w).unwrap();
        let b = build_generator_adaptive(i, res.window(), PivotOrder::Forward, max_order, w.ghost_cap + 3, 4).unwrap();
        let x = BrstComplex::new(&b.resolution, &b.state, w);
        let h0 = (0..=w.max_weight).map(|d| x.cohomology_slice(0, d).unwrap().dimension).collect();
        let hm = (0..=w.max_weight).map(|d| x.cohomology_slice(-1, d).unwrap().dimension).collect();
        let ng = x.no_ghost_check(&b.homotopy, w.max_weight).unwrap().holds;
        let inv = i.invariant_basis(w.max_weight as u32).unwrap();
        assert!(x.compare_h0(&inv, w.max_weight).unwrap().iter().all(|c| c.equal));
        (h0, hm, ng)
    }

    #[test]
    fn angular_momentum() {
        let i = ideal(VariableTable::canonical(2), &["q1*p2 - q2*p1"]);
        let (h0, hm, ng) = dims(&i, CohomologyWindow { max_weight: 2, ghost_cap: 2 }, 6);
        assert_eq!(h0, vec![1, 0, 3]);
        assert_eq!(hm, vec![0, 0, 0]);
        assert!(ng);
    }

    #[test]
    fn so3_invariants_through_weight_four() {
        let i = ideal(
            VariableTable::canonical(3),
            &["q2*p3 - q3*p2", "q3*p1 - q1*p3", "q1*p2 - q2*p1"],
        );
        let (h0, hm, ng) = dims(&i, CohomologyWindow { max_weight: 4, ghost_cap: 1 }, 6);
        assert_eq!(h0, vec![1, 0, 3, 0, 5]);
        assert!(hm.iter().all(|&d| d == 0));
        assert!(ng);
    }

    #[test]
    fn redundant_generators_change_nothing() {
        let w = CohomologyWindow { max_weight: 2, ghost_cap: 2 };
        let a = dims(&ideal(xy(), &["x"]), w, 6);
        let b = dims(&ideal(xy(), &["x", "x"]), w, 6);
        assert_eq!(a, b);
        assert_eq!(a.0, vec![1, 0, 0]);
    }

    #[test]
    fn e1_concentrates_and_squares_vanish() {
        let i = ideal(xy(), &["x^2", "x*y"]);
        let w = CohomologyWindow { max_weight: 3, ghost_cap: 2 };
        let res = fit_resolution(&i, ResolutionWindow::default(), w).unwrap();
        let b = build_generator_adaptive(&i, res.window(), PivotOrder::Forward, 6, w.ghost_cap + 3, 4).unwrap();
        let x = BrstComplex::new(&b.resolution, &b.state, w);
        for total in -1..=1 {
            for weight in 0..=3 {
                let e = x.e1_slice(total, weight);
                assert_eq!(e.dimension, e.expected, "{e:?}");
            }
        }
        for weight in 0..=3 {
            assert!(x.squares_to_zero(-2, weight).unwrap());
            assert!(x.squares_to_zero(-1, weight).unwrap());
        }
    }

    #[test]
    fn reach_is_enforced() {
        let i = ideal(VariableTable::canonical(1), &["q1*p1", "q1^2"]);
        let w = CohomologyWindow { max_weight: 2, ghost_cap: 3 };
        let res = fit_resolution(&i, ResolutionWindow::default(), w).unwrap();
        let b = build_generator_adaptive(&i, res.window(), PivotOrder::Forward, 0, i32::MAX, 0).unwrap();
        let x = BrstComplex::new(&b.resolution, &b.state, w);
        if !b.state.is_terminal() {
            assert!(matches!(
                x.cohomology_slice(-1, 2),
                Err(Error::BeyondReach { .. })
            ));
        }
    }
}
