use std::cmp::Ordering;

use super::variables::{VarId, VariableTable};

/// A graded-commutative monomial: even variables with exponents and a
/// strictly increasing list of odd variables. The sign produced by sorting
/// odd factors is kept in the coefficient, never here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    even: Vec<(VarId, u32)>,
    odd: Vec<VarId>,
}

/// Degrees of a monomial that the rest of the engine slices by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Grading {
    pub ghost: i32,
    pub resolution: i32,
    /// Number of ghost and resolution factors, counted with multiplicity.
    pub form: u32,
    /// Number of base factors, counted with multiplicity.
    pub base: u32,
    pub weight: i32,
}

impl Grading {
    pub fn total(&self) -> i32 {
        self.ghost + self.resolution
    }
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(table: &VariableTable, v: VarId) -> Self {
        if table.get(v).odd {
            Monomial { even: vec![], odd: vec![v] }
        } else {
            Monomial { even: vec![(v, 1)], odd: vec![] }
        }
    }

    /// Builds from parts; `even` must be sorted with positive exponents and
    /// `odd` strictly increasing.
    pub(crate) fn from_parts(even: Vec<(VarId, u32)>, odd: Vec<VarId>) -> Self {
        debug_assert!(even.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(even.iter().all(|&(_, e)| e > 0));
        debug_assert!(odd.windows(2).all(|w| w[0] < w[1]));
        Monomial { even, odd }
    }

    /// All monomials of total degree `degree` in the given even variables,
    /// in decreasing monomial order.
    pub fn all_of_degree(vars: &[VarId], degree: u32) -> Vec<Monomial> {
        fn rec(vars: &[VarId], left: u32, acc: &mut Vec<(VarId, u32)>, out: &mut Vec<Monomial>) {
            match vars.split_first() {
                None => {
                    if left == 0 {
                        out.push(Monomial { even: acc.clone(), odd: vec![] });
                    }
                }
                Some((&v, rest)) => {
                    for e in (0..=left).rev() {
                        if e > 0 {
                            acc.push((v, e));
                        }
                        rec(rest, left - e, acc, out);
                        if e > 0 {
                            acc.pop();
                        }
                    }
                }
            }
        }
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        rec(&sorted, degree, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_one(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    pub fn even(&self) -> &[(VarId, u32)] {
        &self.even
    }

    pub fn odd(&self) -> &[VarId] {
        &self.odd
    }

    /// Parity of the monomial (odd variables only contribute).
    pub fn is_odd(&self) -> bool {
        self.odd.len() % 2 == 1
    }

    pub fn even_degree(&self) -> u32 {
        self.even.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        if let Ok(i) = self.even.binary_search_by_key(&v, |&(id, _)| id) {
            return self.even[i].1;
        }
        self.odd.binary_search(&v).is_ok() as u32
    }

    /// `(variable, exponent)` pairs in increasing id order.
    pub fn factors(&self) -> Vec<(VarId, u32)> {
        let mut out: Vec<(VarId, u32)> = self.even.clone();
        out.extend(self.odd.iter().map(|&v| (v, 1)));
        out.sort_unstable();
        out
    }

    pub fn grading(&self, table: &VariableTable) -> Grading {
        let mut g = Grading::default();
        for (v, e) in self.factors() {
            let d = table.get(v);
            let e32 = e as i32;
            g.ghost += d.ghost * e32;
            g.resolution += d.resolution * e32;
            g.weight += d.weight * e32;
            if d.is_base() {
                g.base += e;
            } else {
                g.form += e;
            }
        }
        g
    }

    /// Product with sign, or `None` when an odd variable repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        let mut odd = Vec::with_capacity(self.odd.len() + other.odd.len());
        let mut negative = false;
        let (a, b) = (&self.odd, &other.odd);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                odd.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                // b[j] jumps over the a's that remain
                if (a.len() - i) % 2 == 1 {
                    negative = !negative;
                }
                odd.push(b[j]);
                j += 1;
            } else {
                return None;
            }
        }
        let even = merge_even(&self.even, &other.even);
        Some((negative, Monomial { even, odd }))
    }

    /// True if every even exponent and odd factor of `self` appears in `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.even.iter().all(|&(v, e)| other.exponent(v) >= e)
            && self.odd.iter().all(|v| other.odd.binary_search(v).is_ok())
    }

    /// Quotient of even-only monomials; `None` if `divisor` does not divide.
    pub fn div_even(&self, divisor: &Monomial) -> Option<Monomial> {
        debug_assert!(self.odd.is_empty() && divisor.odd.is_empty());
        let mut out = Vec::new();
        let mut j = 0;
        for &(v, e) in &self.even {
            let mut d = 0;
            if j < divisor.even.len() && divisor.even[j].0 == v {
                d = divisor.even[j].1;
                j += 1;
            } else if j < divisor.even.len() && divisor.even[j].0 < v {
                return None;
            }
            if d > e {
                return None;
            }
            if e > d {
                out.push((v, e - d));
            }
        }
        if j < divisor.even.len() {
            return None;
        }
        Some(Monomial { even: out, odd: vec![] })
    }

    /// Least common multiple of even-only monomials.
    pub fn lcm_even(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (a, b) = (&self.even, &other.even);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                out.push((a[i].0, a[i].1.max(b[j].1)));
                i += 1;
                j += 1;
            }
        }
        Monomial { even: out, odd: vec![] }
    }

    /// Left partial derivative `∂/∂v` acting from the left: the coefficient
    /// (with sign) and the remaining monomial.
    pub fn derive_left(&self, table: &VariableTable, v: VarId) -> Option<(i64, Monomial)> {
        if table.get(v).odd {
            let p = self.odd.binary_search(&v).ok()?;
            let mut odd = self.odd.clone();
            odd.remove(p);
            let sign = if p % 2 == 0 { 1 } else { -1 };
            Some((sign, Monomial { even: self.even.clone(), odd }))
        } else {
            self.derive_even(v)
        }
    }

    /// Right partial derivative: `v` is moved to the far right first.
    pub fn derive_right(&self, table: &VariableTable, v: VarId) -> Option<(i64, Monomial)> {
        if table.get(v).odd {
            let p = self.odd.binary_search(&v).ok()?;
            let mut odd = self.odd.clone();
            odd.remove(p);
            let sign = if (self.odd.len() - 1 - p) % 2 == 0 { 1 } else { -1 };
            Some((sign, Monomial { even: self.even.clone(), odd }))
        } else {
            self.derive_even(v)
        }
    }

    fn derive_even(&self, v: VarId) -> Option<(i64, Monomial)> {
        let i = self.even.binary_search_by_key(&v, |&(id, _)| id).ok()?;
        let e = self.even[i].1;
        let mut even = self.even.clone();
        if e == 1 {
            even.remove(i);
        } else {
            even[i].1 -= 1;
        }
        Some((e as i64, Monomial { even, odd: self.odd.clone() }))
    }

    /// Splits into `sign * left * right`, where `left` collects the factors
    /// selected by `pick`.
    pub fn split(&self, pick: impl Fn(VarId) -> bool) -> (bool, Monomial, Monomial) {
        let (le, re): (Vec<_>, Vec<_>) = self.even.iter().partition(|&&(v, _)| pick(v));
        let mut left_odd = Vec::new();
        let mut right_odd = Vec::new();
        let mut negative = false;
        for &v in &self.odd {
            if pick(v) {
                // jumps left over the right-hand odd factors seen so far
                if right_odd.len() % 2 == 1 {
                    negative = !negative;
                }
                left_odd.push(v);
            } else {
                right_odd.push(v);
            }
        }
        (
            negative,
            Monomial { even: le, odd: left_odd },
            Monomial { even: re, odd: right_odd },
        )
    }
}

fn merge_even(a: &[(VarId, u32)], b: &[(VarId, u32)]) -> Vec<(VarId, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

/// Lexicographic comparison where having the smaller variable id present
/// (or with a larger exponent) makes a monomial larger.
fn cmp_lex(a: &[(VarId, u32)], b: &[(VarId, u32)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x.0 != y.0 {
            return y.0.cmp(&x.0);
        }
        if x.1 != y.1 {
            return x.1.cmp(&y.1);
        }
    }
    a.len().cmp(&b.len())
}

impl Ord for Monomial {
    /// Degree-lexicographic on the even part, then the odd part.
    fn cmp(&self, other: &Self) -> Ordering {
        self.even_degree()
            .cmp(&other.even_degree())
            .then_with(|| cmp_lex(&self.even, &other.even))
            .then_with(|| self.odd.len().cmp(&other.odd.len()))
            .then_with(|| {
                let a: Vec<_> = self.odd.iter().map(|&v| (v, 1)).collect();
                let b: Vec<_> = other.odd.iter().map(|&v| (v, 1)).collect();
                cmp_lex(&a, &b)
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
