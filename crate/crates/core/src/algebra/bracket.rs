use std::collections::HashMap;

use super::poly::SuperPolynomial;
use super::variables::{common_table, VarId};
use crate::error::{Error, Result};

/// The graded Poisson bracket extending the constant pairing of the table:
///
/// `{f, g} = Σ_{i,j} (f ∂_R/∂x_i) {x_i, x_j} (∂_L/∂x_j g)`.
///
/// Right derivatives of `f` and left derivatives of `g` give graded
/// antisymmetry, Leibniz and Jacobi whenever the pairing itself is graded
/// antisymmetric, which [`super::VariableTable::set_pairing`] guarantees.
pub fn poisson_bracket(f: &SuperPolynomial, g: &SuperPolynomial) -> Result<SuperPolynomial> {
    let table = common_table(f.table(), g.table()).ok_or(Error::TableMismatch)?;
    let mut out = SuperPolynomial::zero(&table);
    if f.is_zero() || g.is_zero() {
        return Ok(out);
    }
    let g_vars = g.variables();
    let mut left_derivs: HashMap<VarId, SuperPolynomial> = HashMap::new();
    for i in f.variables() {
        let partners: Vec<_> = table
            .partners(i)
            .filter(|(j, _)| g_vars.binary_search(j).is_ok())
            .map(|(j, w)| (j, w.clone()))
            .collect();
        if partners.is_empty() {
            continue;
        }
        let df = f.derive_right(i);
        for (j, w) in partners {
            let dg = left_derivs.entry(j).or_insert_with(|| g.derive_left(j));
            if dg.is_zero() {
                continue;
            }
            let prod = &df * dg;
            out.add_scaled(&prod, &w);
        }
    }
    Ok(out)
}

/// Bracket for operands known to share a table.
pub(crate) fn bracket(f: &SuperPolynomial, g: &SuperPolynomial) -> SuperPolynomial {
    poisson_bracket(f, g).expect("variable tables differ")
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::VariableTable;
    use crate::Rational;

    #[test]
    fn canonical_pair() {
        let t = Arc::new(VariableTable::canonical(1));
        let q = SuperPolynomial::var(&t, 0);
        let p = SuperPolynomial::var(&t, 1);
        assert_eq!(bracket(&q, &p), SuperPolynomial::one(&t));
        assert_eq!(bracket(&p, &q), -&SuperPolynomial::one(&t));
    }

    #[test]
    fn ghost_evaluates_antighost() {
        let mut t = VariableTable::canonical(1);
        let (pa, eta) = t.add_resolution_pair("P1", "eta1", -1, 2).unwrap();
        let (pb, etb) = t.add_resolution_pair("P2", "eta2", -1, 2).unwrap();
        let t = Arc::new(t);
        let v = |x| SuperPolynomial::var(&t, x);
        assert_eq!(bracket(&v(eta), &v(pa)), SuperPolynomial::one(&t));
        assert_eq!(bracket(&v(pa), &v(eta)), SuperPolynomial::one(&t));
        assert!(bracket(&v(eta), &v(pb)).is_zero());
        assert_eq!(bracket(&v(etb), &v(pb)), SuperPolynomial::one(&t));
    }

    #[test]
    fn rotation_generator_preserves_radius() {
        let t = Arc::new(VariableTable::canonical(2));
        let v = |x| SuperPolynomial::var(&t, x);
        let l = &(&v(0) * &v(3)) - &(&v(1) * &v(2));
        let r = &(&v(0) * &v(0)) + &(&v(1) * &v(1));
        assert!(bracket(&l, &r).is_zero());
        let _ = Rational::from_integer(0.into());
    }
}
