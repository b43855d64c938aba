//! Finite-field additive combinatorics at desk scale.
//!
//! Tabulated GF(p^n) arithmetic and characters, rational functions, exact
//! energies, a constructive low-energy decomposition, triple character sums
//! and the verification harness built on them.

pub mod characters;
pub mod charsums;
pub mod decompose;
pub mod energy;
pub mod field;
pub mod harness;
pub mod ratfunc;
pub mod sets;
pub mod setspec;

pub use field::{build_field, FieldCtx, FieldElement, FieldError};
pub use ratfunc::RationalFunction;
pub use sets::FSubset;
