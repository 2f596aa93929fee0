use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::monomial::{Grading, Monomial};
use super::variables::{common_table, VarId, VariableTable};
use crate::error::{Error, Result};
use crate::Rational;

/// Exact element of `(ΛΨ)* ⊗ P ⊗ ΛΨ` in canonical form.
#[derive(Clone)]
pub struct SuperPolynomial {
    table: Arc<VariableTable>,
    terms: BTreeMap<Monomial, Rational>,
}

impl SuperPolynomial {
    pub fn zero(table: &Arc<VariableTable>) -> Self {
        SuperPolynomial { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(table: &Arc<VariableTable>, c: Rational) -> Self {
        Self::term(table, Monomial::one(), c)
    }

    pub fn one(table: &Arc<VariableTable>) -> Self {
        Self::constant(table, Rational::one())
    }

    pub fn var(table: &Arc<VariableTable>, v: VarId) -> Self {
        Self::term(table, Monomial::var(table, v), Rational::one())
    }

    pub fn term(table: &Arc<VariableTable>, m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SuperPolynomial { table: table.clone(), terms }
    }

    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(
        table: &Arc<VariableTable>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut p = Self::zero(table);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    /// Re-expresses over an extension of the current table.
    pub fn with_table(&self, table: &Arc<VariableTable>) -> Result<Self> {
        if !table.extends(&self.table) {
            return Err(Error::TableMismatch);
        }
        Ok(SuperPolynomial { table: table.clone(), terms: self.terms.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SuperPolynomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        SuperPolynomial {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    /// `sign * m * self` for a single monomial on the left.
    pub fn mul_monomial_left(&self, m: &Monomial, c: &Rational) -> Self {
        let mut out = Self::zero(&self.table);
        for (n, d) in &self.terms {
            if let Some((neg, prod)) = m.mul(n) {
                let v = d * c;
                out.add_term(prod, if neg { -v } else { v });
            }
        }
        out
    }

    /// Graded-commutative product.
    pub fn multiply(&self, other: &SuperPolynomial) -> Result<Self> {
        let table = common_table(&self.table, &other.table).ok_or(Error::TableMismatch)?;
        let mut out = Self::zero(&table);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((neg, m)) = a.mul(b) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.table);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// True if every term has the same parity; returns it.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|m| m.is_odd());
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn gradings(&self) -> impl Iterator<Item = Grading> + '_ {
        self.terms.keys().map(|m| m.grading(&self.table))
    }

    /// Smallest ghost degree among the terms (`None` for zero).
    pub fn min_ghost_degree(&self) -> Option<i32> {
        self.gradings().map(|g| g.ghost).min()
    }

    /// Left derivative `∂_L/∂v`.
    pub fn derive_left(&self, v: VarId) -> Self {
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            if let Some((k, rest)) = m.derive_left(&self.table, v) {
                out.add_term(rest, c * Rational::from_integer(k.into()));
            }
        }
        out
    }

    /// Right derivative `∂_R/∂v`.
    pub fn derive_right(&self, v: VarId) -> Self {
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            if let Some((k, rest)) = m.derive_right(&self.table, v) {
                out.add_term(rest, c * Rational::from_integer(k.into()));
            }
        }
        out
    }

    /// Variables occurring in some term.
    pub fn variables(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().into_iter().map(|(v, _)| v))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Applies the derivation (of either parity) determined by `images` on
    /// the listed variables and zero elsewhere: `D(f) = Σ D(x_v) ∂_L f/∂x_v`.
    pub fn apply_derivation(&self, images: &HashMap<VarId, SuperPolynomial>) -> Self {
        let mut out = Self::zero(&self.table);
        for v in self.variables() {
            if let Some(img) = images.get(&v) {
                let d = self.derive_left(v);
                if !d.is_zero() {
                    out = &out + &(img * &d);
                }
            }
        }
        out
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        SuperPolynomial {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Splits into parts of equal grading; the parts sum to `self`.
    pub fn bidegree_decompose(&self) -> BTreeMap<Grading, SuperPolynomial> {
        let mut out: BTreeMap<Grading, SuperPolynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.grading(&self.table))
                .or_insert_with(|| Self::zero(&self.table))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Same terms, compared irrespective of table identity.
    pub fn same_terms(&self, other: &SuperPolynomial) -> bool {
        self.terms == other.terms
    }
}

impl PartialEq for SuperPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && common_table(&self.table, &other.table).is_some()
    }
}

impl Eq for SuperPolynomial {}

impl fmt::Debug for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperPolynomial({self})")
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, table: &VariableTable, m: &Monomial) -> fmt::Result {
    for (v, e) in m.factors() {
        write!(f, "*{}", table.get(v).name)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for SuperPolynomial {
    /// Terms from the leading one down, every term carrying its coefficient:
    /// `1*q1*p2 - 1*q2*p1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let abs = c.abs();
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{abs}")?,
                (0, true) => write!(f, "-{abs}")?,
                (_, false) => write!(f, " + {abs}")?,
                (_, true) => write!(f, " - {abs}")?,
            }
            write_monomial(f, &self.table, m)?;
        }
        Ok(())
    }
}

impl<'a> Add for &'a SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, rhs: Self) -> SuperPolynomial {
        let table = common_table(&self.table, &rhs.table).expect("variable tables differ");
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        out.table = table;
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub for &'a SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, rhs: Self) -> SuperPolynomial {
        self + &(-rhs)
    }
}

impl<'a> Neg for &'a SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        SuperPolynomial {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul for &'a SuperPolynomial {
    type Output = SuperPolynomial;
    /// Panics on unrelated tables; use [`SuperPolynomial::multiply`] to get an error instead.
    fn mul(self, rhs: Self) -> SuperPolynomial {
        self.multiply(rhs).expect("variable tables differ")
    }
}
