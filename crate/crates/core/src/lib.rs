//! Exact symbolic BRST machinery for polynomial Poisson algebras.
//!
//! Given constraints generating a first-class ideal `I` in a polynomial
//! Poisson algebra `P`, the crate builds the Koszul-Tate resolution of `P/I`,
//! constructs the BRST generator `Q` by homological perturbation, and
//! computes the cohomology of `{Q, ·}` slice by slice over the rationals.

pub mod algebra;
pub mod brst;
pub mod cohomology;
pub mod error;
pub mod ideal;
pub mod homotopy;
pub mod koszul_tate;
pub mod linalg;
pub mod rinehart;

pub use algebra::{parse_polynomial, poisson_bracket, Grading, Monomial, SuperPolynomial, VarId, VariableTable};
pub use error::{Error, Result};

/// Exact coefficients.
pub type Rational = num_rational::BigRational;

pub(crate) fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    value: &T,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}
