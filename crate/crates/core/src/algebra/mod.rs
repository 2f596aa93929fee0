//! Graded-commutative polynomials over a variable table, with the Poisson
//! bracket extended to ghosts and resolution generators.

mod bracket;
mod monomial;
mod parse;
mod poly;
mod variables;

pub use bracket::poisson_bracket;
pub(crate) use bracket::bracket;
pub use monomial::{Grading, Monomial};
pub use parse::parse_polynomial;
pub use poly::SuperPolynomial;
pub use variables::{VarId, VarKind, VariableDecl, VariableTable};
