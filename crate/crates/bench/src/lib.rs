//! Constraint systems shared by the benchmarks.

use std::sync::Arc;

use brstkit_core::ideal::{groebner_basis, IdealPresentation};
use brstkit_core::{parse_polynomial, SuperPolynomial, VariableTable};

pub fn constraints(n: usize, gens: &[&str]) -> (Arc<VariableTable>, Vec<SuperPolynomial>) {
    let table = Arc::new(VariableTable::canonical(n));
    let polys = gens.iter().map(|g| parse_polynomial(&table, g).unwrap()).collect();
    (table, polys)
}

pub fn ideal(n: usize, gens: &[&str]) -> IdealPresentation {
    let (table, polys) = constraints(n, gens);
    groebner_basis(&table, &polys).unwrap()
}

pub const ANGULAR_MOMENTUM: &[&str] = &["q1*p2 - q2*p1"];

pub const SO3: &[&str] = &["q2*p3 - q3*p2", "q3*p1 - q1*p3", "q1*p2 - q2*p1"];

/// Squared length and the dilation generator in two dimensions.
pub const SL2_PAIR: &[&str] = &["q1^2 + q2^2", "q1*p1 + q2*p2"];
