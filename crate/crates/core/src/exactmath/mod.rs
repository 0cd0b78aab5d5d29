//! Exact arithmetic: rational polynomials, real algebraic numbers, number
//! fields, integer lattices and factorization.

pub mod embed;
pub mod expr;
pub mod factor;
pub mod field;
pub mod hnf;
pub mod matrix;
pub mod poly;
pub mod roots;

pub use embed::find_root_in_field;
pub use expr::parse_element;
pub use factor::{factor_over_rationals, Factorization, DEFAULT_DEGREE_BOUND};
pub use field::{nf_arith, nf_sign, CompanionPair, FieldElement, FieldRef, NumberField};
pub use poly::{rat, Polynomial, Rational};
pub use roots::{compare_real, isolate_real_roots, RealAlgebraic};
