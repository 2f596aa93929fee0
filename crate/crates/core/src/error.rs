use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("no pairing allowed between `{0}` and `{1}`")]
    InvalidPairing(String, String),
    #[error("operands live over unrelated variable tables")]
    TableMismatch,
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("column {column}: unknown variable `{name}`")]
    UnknownVariable { name: String, column: usize },

    #[error("ideal generator `{0}` must be even and built from base variables only")]
    NotBaseEven(String),
    #[error("constraint `{0}` is not homogeneous")]
    NotHomogeneous(String),
    #[error("`{0}` does not lie in the constraint ideal")]
    NotInIdeal(String),
    #[error("ideal is not first class: {{g{}, g{}}} = {bracket} has normal form {remainder}", .i + 1, .j + 1)]
    NotFirstClass {
        i: usize,
        j: usize,
        bracket: String,
        remainder: String,
    },

    #[error("slice (degree {degree}, weight {weight}) lies outside the window")]
    OutOfWindow { degree: i32, weight: i32 },
    #[error("homotopy cannot be solved on slice (degree {degree}, weight {weight}): resolution not acyclic there")]
    Unsolvable { degree: i32, weight: i32 },

    #[error("resolution generator `{0}` has no dual ghost")]
    MissingDualGhost(String),
    #[error("order {order}: {what} has filtration degree {found}, expected at least {expected}")]
    FiltrationViolation {
        order: usize,
        what: &'static str,
        found: i32,
        expected: i32,
    },
    #[error("differential does not square to zero on slice (total {total}, weight {weight})")]
    NotNilpotent { total: i32, weight: i32 },

    #[error("slice of total degree {total} needs the generator exact below filtration {needed}, but it is only certified below {certified}")]
    BeyondReach { total: i32, needed: i32, certified: i32 },

    #[error("cochains of arity {0} are not supported")]
    ArityUnsupported(usize),
}
