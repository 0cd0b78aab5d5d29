//! Exact classification of finite ergodic tail-invariant measures on
//! stationary Bratteli diagrams, the sets of values they take on clopen
//! sets, and constructions of diagrams realizing a prescribed value set.

pub mod construct;
pub mod diagram;
pub mod error;
pub mod exactmath;
pub mod goodness;
pub mod measure;
pub mod report;
pub mod values;

pub use construct::{
    build_rational_family, collapse_to_simple, extend_with_minimal_component, Budgets,
    ConstructionResult,
};
pub use diagram::{decompose_classes, count_minimal_components, Diagram};
pub use error::{Error, Result};
pub use goodness::{is_good, quotient_condition_witness};
pub use measure::{build_measure, cylinder_measure, ErgodicMeasure};
pub use values::{enumerate_level_values, group_equal, member_s, parse_value, LatticeGroup};
