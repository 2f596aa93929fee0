//! Contracting homotopy `s` with `sδ + δs = 1 - π̄`.
//!
//! `π̄` is the normal-form projection on resolution degree 0 and zero
//! elsewhere. On a monomial `x` of degree `k`,
//!
//! ```text
//! s(x) = δ⁺(x - π̄x)       k = 0
//! s(x) = δ⁺(x - s(δx))    k < 0
//! ```
//!
//! where `δ⁺` picks a preimage from the echelon form of `δ` on the slice
//! below. Slices are solved when first touched, so the operator reaches past
//! the resolution window wherever the resolution happens to be exact.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::One;
use serde::Serialize;

use crate::algebra::{Monomial, SuperPolynomial};
use crate::error::{Error, Result};
use crate::koszul_tate::{SliceKey, TateResolution};
use crate::linalg::Echelon;
use crate::Rational;

/// Column order used when eliminating `δ`; different orders give different
/// but equally valid homotopies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PivotOrder {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug)]
pub struct HomotopyOperator {
    resolution: Arc<TateResolution>,
    order: PivotOrder,
    solved: Mutex<HashMap<SliceKey, Arc<Echelon>>>,
    memo: Mutex<HashMap<Monomial, Result<SuperPolynomial>>>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct HomotopyCheck {
    pub slices: usize,
    pub monomials: usize,
    pub identity_holds: bool,
    pub square_vanishes: bool,
    pub kills_normal_forms: bool,
    pub failures: Vec<String>,
}

/// Result of applying `s` where some slices may be unsolvable.
#[derive(Debug, Clone)]
pub struct PartialImage {
    pub value: SuperPolynomial,
    /// Terms of the input that were left out.
    pub skipped: SuperPolynomial,
    /// The first failure encountered.
    pub error: Option<Error>,
}

pub fn build_homotopy(resolution: Arc<TateResolution>, order: PivotOrder) -> HomotopyOperator {
    HomotopyOperator {
        resolution,
        order,
        solved: Mutex::new(HashMap::new()),
        memo: Mutex::new(HashMap::new()),
    }
}

impl HomotopyOperator {
    pub fn resolution(&self) -> &Arc<TateResolution> {
        &self.resolution
    }

    pub fn order(&self) -> PivotOrder {
        self.order
    }

    /// Echelon of the image of `δ` landing in `target`, tagged by source
    /// coordinates.
    fn image_echelon(&self, target: SliceKey) -> Arc<Echelon> {
        if let Some(e) = self.solved.lock().unwrap().get(&target) {
            return e.clone();
        }
        let source = SliceKey::new(target.degree - 1, target.weight, !target.odd);
        let m = self.resolution.delta_matrix(source);
        let n = m.cols();
        let (ech, _) = match self.order {
            PivotOrder::Forward => m.eliminate(0..n),
            PivotOrder::Reverse => m.eliminate((0..n).rev()),
        };
        let ech = Arc::new(ech);
        self.solved.lock().unwrap().insert(target, ech.clone());
        ech
    }

    fn preimage(&self, key: SliceKey, y: &SuperPolynomial) -> Result<SuperPolynomial> {
        let table = self.resolution.table();
        if y.is_zero() {
            return Ok(SuperPolynomial::zero(table));
        }
        let target = self.resolution.k_slice(key);
        let ech = self.image_echelon(key);
        let (rem, tag) = ech.reduce(&target.coordinates(y));
        if !rem.is_empty() {
            return Err(Error::Unsolvable { degree: key.degree, weight: key.weight });
        }
        let source = self.resolution.k_slice(SliceKey::new(key.degree - 1, key.weight, !key.odd));
        Ok(source.polynomial(table, &tag))
    }

    fn key_of(&self, m: &Monomial) -> SliceKey {
        let g = m.grading(self.resolution.table());
        SliceKey::new(g.resolution, g.weight, m.is_odd())
    }

    /// `s` on a monomial of `P ⊗ ΛΨ`.
    fn on_k_monomial(&self, m: &Monomial) -> Result<SuperPolynomial> {
        if let Some(r) = self.memo.lock().unwrap().get(m) {
            return r.clone();
        }
        let table = self.resolution.table();
        let key = self.key_of(m);
        let x = SuperPolynomial::term(table, m.clone(), Rational::one());
        let result = (|| {
            let y = if key.degree == 0 {
                &x - &self.pi_bar(&x)
            } else {
                let dx = self.resolution.delta(&x);
                &x - &self.apply(&dx)?
            };
            self.preimage(key, &y)
        })();
        self.memo.lock().unwrap().insert(m.clone(), result.clone());
        result
    }

    /// `(1 ⊗ s)` on the ghost-extended algebra: `s(γ k) = (-1)^{|γ|} γ s(k)`.
    pub fn apply(&self, f: &SuperPolynomial) -> Result<SuperPolynomial> {
        let p = self.apply_partial(f);
        match p.error {
            None => Ok(p.value),
            Some(e) => Err(e),
        }
    }

    /// Like [`Self::apply`] but skips terms whose slice cannot be solved.
    pub fn apply_partial(&self, f: &SuperPolynomial) -> PartialImage {
        let table = self.resolution.table();
        let f = f.with_table(table).expect("polynomial from a foreign table");
        let mut value = SuperPolynomial::zero(table);
        let mut skipped = SuperPolynomial::zero(table);
        let mut error = None;
        for (m, c) in f.terms() {
            match self.on_monomial(m) {
                Ok(s) => value.add_scaled(&s, c),
                Err(e) => {
                    skipped.add_term(m.clone(), c.clone());
                    error.get_or_insert(e);
                }
            }
        }
        PartialImage { value, skipped, error }
    }

    /// `s` on one monomial of the ghost-extended algebra.
    pub fn on_monomial(&self, m: &Monomial) -> Result<SuperPolynomial> {
        let table = self.resolution.table();
        let (neg, ghosts, k) = m.split(|v| table.get(v).is_ghost());
        let sk = self.on_k_monomial(&k)?;
        let sign = if neg != ghosts.is_odd() { -Rational::one() } else { Rational::one() };
        Ok(sk.mul_monomial_left(&ghosts, &sign))
    }

    /// `1 ⊗ π̄`: normal form on resolution degree 0, zero elsewhere.
    pub fn pi_bar(&self, f: &SuperPolynomial) -> SuperPolynomial {
        let table = self.resolution.table();
        let zero_degree = f.filter(|m| m.grading(table).resolution == 0);
        self.resolution.ideal().normal_form(&zero_degree).representative().clone()
    }

    /// Checks `sδf + δsf = f - π̄f`.
    pub fn identity_holds_on(&self, f: &SuperPolynomial) -> Result<bool> {
        let r = &self.resolution;
        let lhs = &self.apply(&r.delta(f))? + &r.delta(&self.apply(f)?);
        let rhs = f - &self.pi_bar(f);
        Ok(lhs == rhs)
    }

    /// Verifies the homotopy identity on every basis monomial of every
    /// `K` slice in the resolution window, recording whether `s² = 0` and
    /// whether `s` kills normal forms along the way.
    pub fn verify_window(&self) -> HomotopyCheck {
        let r = &self.resolution;
        let w = r.window();
        let table = r.table();
        let mut check = HomotopyCheck {
            identity_holds: true,
            square_vanishes: true,
            kills_normal_forms: true,
            ..Default::default()
        };
        for degree in -w.depth..=0 {
            for weight in 0..=w.max_weight {
                for odd in [false, true] {
                    let slice = r.k_slice(SliceKey::new(degree, weight, odd));
                    if slice.is_empty() {
                        continue;
                    }
                    check.slices += 1;
                    for m in slice.basis() {
                        check.monomials += 1;
                        let x = SuperPolynomial::term(table, m.clone(), Rational::one());
                        match self.identity_holds_on(&x) {
                            Ok(true) => {}
                            Ok(false) => {
                                check.identity_holds = false;
                                check.failures.push(format!("identity fails on {x}"));
                            }
                            Err(e) => {
                                check.identity_holds = false;
                                check.failures.push(e.to_string());
                            }
                        }
                        if let Ok(sx) = self.apply(&x) {
                            if !matches!(self.apply(&sx), Ok(ssx) if ssx.is_zero()) {
                                check.square_vanishes = false;
                            }
                        }
                        if degree == 0 {
                            let nf = self.pi_bar(&x);
                            if !matches!(self.apply(&nf), Ok(s) if s.is_zero()) {
                                check.kills_normal_forms = false;
                            }
                        }
                    }
                }
            }
        }
        check
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, VariableTable};
    use crate::ideal::groebner_basis;
    use crate::koszul_tate::{build_resolution, ResolutionWindow};

    fn setup(gens: &[&str], window: ResolutionWindow, order: PivotOrder) -> HomotopyOperator {
        let mut t = VariableTable::new();
        let x = t.add_base("x", false).unwrap();
        let y = t.add_base("y", false).unwrap();
        t.set_pairing(x, y, Rational::one()).unwrap();
        let t = Arc::new(t);
        let gens: Vec<_> = gens.iter().map(|g| parse_polynomial(&t, g).unwrap()).collect();
        let i = groebner_basis(&t, &gens).unwrap();
        build_homotopy(Arc::new(build_resolution(&i, window).unwrap()), order)
    }

    #[test]
    fn single_variable_slice() {
        let h = setup(&["x"], ResolutionWindow::default(), PivotOrder::Forward);
        let t = h.resolution().table().clone();
        let p = |s: &str| parse_polynomial(&t, s).unwrap();
        assert_eq!(h.apply(&p("x^2")).unwrap(), p("x*P1"));
        assert!(h.apply(&p("1")).unwrap().is_zero());
        assert_eq!(h.pi_bar(&p("1")), p("1"));
        assert!(h.identity_holds_on(&p("x^2")).unwrap());
    }

    #[test]
    fn identity_on_the_window() {
        for gens in [&["x"][..], &["x", "y"], &["x", "x"], &["x^2", "x*y"]] {
            for order in [PivotOrder::Forward, PivotOrder::Reverse] {
                let h = setup(gens, ResolutionWindow { max_weight: 4, depth: 3 }, order);
                let c = h.verify_window();
                assert!(c.identity_holds, "{gens:?}: {:?}", c.failures);
                assert!(c.kills_normal_forms);
            }
        }
    }

    #[test]
    fn ghosts_ride_along() {
        let h = setup(&["x"], ResolutionWindow::default(), PivotOrder::Forward);
        let t = h.resolution().table().clone();
        let p = |s: &str| parse_polynomial(&t, s).unwrap();
        assert_eq!(h.apply(&p("eta1*x")).unwrap(), -&p("eta1*P1"));
        assert!(h.identity_holds_on(&p("eta1*x*y")).unwrap());
    }
}
