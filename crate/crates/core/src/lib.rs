//! Exact symbolic engine for uniform p-adic measure and integration.
//!
//! The crate computes measures of cell-defined subsets of a local field and
//! integrals of prepared functions as exact rational functions in the residue
//! field cardinality `q`, sums definable families into bivariate rational
//! functions in `(q, T)`, and cross-validates every symbolic answer against
//! exhaustive counting in `Z/p^s`.
//!
//! Module map:
//! - [`qring`]: rationals, polynomials and rational functions in `q` (and in
//!   `q, T`), residue-field classes, and the ring of motivic values.
//! - [`cells`]: the cell data model, exact cell measure, n-th-power cell
//!   constructors and a constructive decomposer for a linear-constraint DSL.
//! - [`presburger`]: closed-form rational generating functions for
//!   step-linear sequences.
//! - [`integrate`]: integration of prepared functions over cells, rectangles
//!   and one-parameter families.
//! - [`oracle`]: ground-truth numerics over `Z/p^s` and `F_p`, plus minimal
//!   linear-recurrence fitting.
//! - [`dsl`]: parser for the input language used by the CLI.
//! - [`report`]: report envelopes and JSON emitters shared with the CLI.

pub mod cells;
pub mod dsl;
pub mod integrate;
pub mod oracle;
pub mod presburger;
pub mod qring;
pub mod report;

pub use qring::{MotivicValue, PolyQ, Rat, RatFuncQ, RatFuncQT, ResidueClass};
