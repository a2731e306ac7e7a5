//! Exact arithmetic foundation: arbitrary-precision rationals, polynomials
//! and rational functions in `q` (and in `q, T`), and the formal ring of
//! motivic values with residue-class symbols.

mod formula;
mod motivic;
mod poly;
mod qt;
mod rat;
mod ratfunc;
mod residue;

pub use formula::{Atom, CompiledFormula, Formula, IntPoly};
pub use motivic::{MotivicValue, MvTerm};
pub use poly::PolyQ;
pub use qt::{normalize_rational_t, PolyQT, RatFuncQT};
pub use rat::Rat;
pub use ratfunc::RatFuncQ;
pub use residue::{catalog, largest_prime_factor, substitute_unary, CountMode, ResidueClass};

use thiserror::Error;

/// Errors raised by the exact-arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QringError {
    /// A prime below the validity threshold of a residue class was used.
    #[error("prime {p} is below the validity threshold {threshold} of class `{class}`")]
    ThresholdViolation { p: u64, threshold: u32, class: String },
    /// Evaluation hit a vanishing denominator.
    #[error("denominator vanishes at q = {at}")]
    DenominatorVanishes { at: String },
    /// A denominator with an integer root >= 2 was rejected at construction.
    #[error("denominator `{den}` vanishes at integer q = {root} >= 2")]
    InvalidDenominator { den: String, root: String },
    /// Division by zero in a rational-function field.
    #[error("division by zero")]
    DivisionByZero,
    /// A formal power-series expansion does not exist (denominator has no
    /// constant term in T).
    #[error("series expansion undefined: denominator constant term in T is zero")]
    NotExpandable,
}
