#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use brstkit_core::ideal::{groebner_basis, IdealPresentation};
use brstkit_core::{parse_polynomial, poisson_bracket, Monomial, Rational, SuperPolynomial, VarId, VariableTable};
use num_traits::{One, Zero};
use rand::Rng;

/// Two canonical pairs, an odd base pair, two degree -1 generators and one
/// degree -2 generator with their ghosts.
pub fn super_table() -> Arc<VariableTable> {
    let mut t = VariableTable::canonical(2);
    let a = t.add_base("th1", true).unwrap();
    let b = t.add_base("th2", true).unwrap();
    t.set_pairing(a, b, Rational::from_integer(1.into())).unwrap();
    t.add_resolution_pair("P1", "eta1", -1, 2).unwrap();
    t.add_resolution_pair("P2", "eta2", -1, 1).unwrap();
    t.add_resolution_pair("P3", "eta3", -2, 3).unwrap();
    Arc::new(t)
}

pub fn table(n: usize) -> Arc<VariableTable> {
    Arc::new(VariableTable::canonical(n))
}

pub fn poly(t: &Arc<VariableTable>, s: &str) -> SuperPolynomial {
    parse_polynomial(t, s).unwrap()
}

pub fn ideal(t: &Arc<VariableTable>, gens: &[&str]) -> IdealPresentation {
    let gens: Vec<_> = gens.iter().map(|g| poly(t, g)).collect();
    groebner_basis(t, &gens).unwrap()
}

pub fn ideal_in(n: usize, gens: &[&str]) -> IdealPresentation {
    ideal(&table(n), gens)
}

fn small_rational(rng: &mut impl Rng) -> Rational {
    let n: i64 = rng.gen_range(-5..=5);
    let d: i64 = rng.gen_range(1..=3);
    Rational::new(n.into(), d.into())
}

/// Random polynomial of the given parity: at most `terms` terms, each with
/// at most `max_base` base factors and `max_form` ghost or resolution
/// factors.
pub fn random_poly(
    rng: &mut impl Rng,
    t: &Arc<VariableTable>,
    odd: bool,
    max_base: u32,
    max_form: u32,
    terms: usize,
) -> SuperPolynomial {
    let base: Vec<VarId> = t.ids().filter(|&v| t.get(v).is_base()).collect();
    let form: Vec<VarId> = t.ids().filter(|&v| !t.get(v).is_base()).collect();
    let mut out = SuperPolynomial::zero(t);
    let mut attempts = 0;
    while out.len() < terms && attempts < 50 * terms {
        attempts += 1;
        let mut m = SuperPolynomial::constant(t, small_rational(rng));
        for _ in 0..rng.gen_range(0..=max_base) {
            m = &m * &SuperPolynomial::var(t, base[rng.gen_range(0..base.len())]);
        }
        if !form.is_empty() {
            for _ in 0..rng.gen_range(0..=max_form) {
                m = &m * &SuperPolynomial::var(t, form[rng.gen_range(0..form.len())]);
            }
        }
        if m.is_zero() || m.parity() != Some(odd) {
            continue;
        }
        out = &out + &m;
    }
    out
}

/// Random even polynomial in the base variables only.
pub fn random_base_poly(
    rng: &mut impl Rng,
    t: &Arc<VariableTable>,
    max_degree: u32,
    terms: usize,
) -> SuperPolynomial {
    let vars = t.even_base_vars();
    let mut out = SuperPolynomial::zero(t);
    for _ in 0..terms {
        let mut m = SuperPolynomial::constant(t, small_rational(rng));
        for _ in 0..rng.gen_range(0..=max_degree) {
            m = &m * &SuperPolynomial::var(t, vars[rng.gen_range(0..vars.len())]);
        }
        out = &out + &m;
    }
    out
}

pub fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::from_integer(1.into())
    } else {
        Rational::from_integer(1.into())
    }
}

/// Exponent vectors over `q1..qn, p1..pn`.
pub type Dense = BTreeMap<Vec<u32>, Rational>;

pub fn dense(f: &SuperPolynomial, n: usize) -> Dense {
    let mut out = Dense::new();
    for (m, c) in f.terms() {
        let mut e = vec![0; 2 * n];
        for (v, k) in m.factors() {
            e[v as usize] = k;
        }
        out.insert(e, c.clone());
    }
    out
}

fn partial(f: &Dense, i: usize) -> Dense {
    let mut out = Dense::new();
    for (e, c) in f {
        if e[i] > 0 {
            let mut e2 = e.clone();
            e2[i] -= 1;
            *out.entry(e2).or_insert_with(Rational::zero) += c * Rational::from_integer(e[i].into());
        }
    }
    out
}

fn product(f: &Dense, g: &Dense) -> Dense {
    let mut out = Dense::new();
    for (a, x) in f {
        for (b, y) in g {
            let e: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
            *out.entry(e).or_insert_with(Rational::zero) += x * y;
        }
    }
    out
}

pub fn naive_bracket(f: &Dense, g: &Dense, n: usize) -> Dense {
    let mut out = Dense::new();
    for i in 0..n {
        for (e, c) in product(&partial(f, i), &partial(g, n + i)) {
            *out.entry(e).or_insert_with(Rational::zero) += c;
        }
        for (e, c) in product(&partial(f, n + i), &partial(g, i)) {
            *out.entry(e).or_insert_with(Rational::zero) -= c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `k[x, y]` with `{x, y} = 1`.
pub fn xy_table() -> Arc<VariableTable> {
    let mut t = VariableTable::new();
    let x = t.add_base("x", false).unwrap();
    let y = t.add_base("y", false).unwrap();
    t.set_pairing(x, y, Rational::one()).unwrap();
    Arc::new(t)
}

/// Rank of a family of sparse vectors by plain Gaussian elimination.
pub fn rank<K: Ord + Clone>(vectors: impl IntoIterator<Item = BTreeMap<K, Rational>>) -> usize {
    let mut pivots: BTreeMap<K, BTreeMap<K, Rational>> = BTreeMap::new();
    for mut v in vectors {
        v.retain(|_, c| !c.is_zero());
        while let Some((k, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) {
            match pivots.get(&k) {
                Some(p) => {
                    for (j, a) in p {
                        let e = v.entry(j.clone()).or_insert_with(Rational::zero);
                        *e -= &c * a;
                    }
                    v.retain(|_, c| !c.is_zero());
                }
                None => {
                    let inv = c.recip();
                    let p = v.into_iter().map(|(j, a)| (j, a * &inv)).collect();
                    pivots.insert(k, p);
                    break;
                }
            }
        }
    }
    pivots.len()
}

pub fn coords(f: &SuperPolynomial) -> BTreeMap<Monomial, Rational> {
    f.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// All products of `degree` even base variables.
pub fn base_monomials(t: &Arc<VariableTable>, degree: i32) -> Vec<SuperPolynomial> {
    if degree < 0 {
        return Vec::new();
    }
    fn go(t: &Arc<VariableTable>, vars: &[VarId], d: i32, acc: SuperPolynomial, out: &mut Vec<SuperPolynomial>) {
        if d == 0 {
            out.push(acc);
            return;
        }
        for (k, &v) in vars.iter().enumerate() {
            go(t, &vars[k..], d - 1, &acc * &SuperPolynomial::var(t, v), out);
        }
    }
    let mut out = Vec::new();
    go(t, &t.even_base_vars(), degree, SuperPolynomial::one(t), &mut out);
    out
}

fn degree(f: &SuperPolynomial) -> i32 {
    f.terms().next().map_or(0, |(m, _)| m.even_degree() as i32)
}

/// `I_d` as a spanning set `m * g`.
pub fn ideal_span(t: &Arc<VariableTable>, gens: &[SuperPolynomial], d: i32) -> Vec<SuperPolynomial> {
    gens.iter()
        .filter(|g| !g.is_zero())
        .flat_map(|g| base_monomials(t, d - degree(g)).into_iter().map(move |m| &m * g))
        .collect()
}

/// `dim (P/I)_d` as `dim P_d - dim I_d`.
pub fn quotient_dim(t: &Arc<VariableTable>, gens: &[SuperPolynomial], d: i32) -> usize {
    base_monomials(t, d).len() - rank(ideal_span(t, gens, d).iter().map(coords))
}

/// `dim (P/I)^I_d` for homogeneous generators: classes `[f]` with
/// `{g, f} ∈ I` for every generator `g`.
pub fn invariant_dim(t: &Arc<VariableTable>, gens: &[SuperPolynomial], d: i32) -> usize {
    let tag = |k: usize, f: &SuperPolynomial| -> BTreeMap<(usize, Monomial), Rational> {
        f.terms().map(|(m, c)| ((k, m.clone()), c.clone())).collect()
    };
    let mut targets = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        for x in ideal_span(t, gens, d + degree(g) - 2) {
            targets.push(tag(k, &x));
        }
    }
    let images: Vec<_> = base_monomials(t, d)
        .iter()
        .map(|f| {
            let mut v = BTreeMap::new();
            for (k, g) in gens.iter().enumerate() {
                v.extend(tag(k, &poisson_bracket(g, f).unwrap()));
            }
            v
        })
        .collect();
    let n = base_monomials(t, d).len();
    let target_rank = rank(targets.clone());
    let joint = rank(targets.into_iter().chain(images));
    let invariant = n - (joint - target_rank);
    invariant - rank(ideal_span(t, gens, d).iter().map(coords))
}
