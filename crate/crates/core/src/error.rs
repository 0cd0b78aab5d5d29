use num_bigint::BigUint;
use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed diagram JSON: {0}")]
    Json(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("polynomial of degree {degree} exceeds the supported degree bound {bound}")]
    UnsupportedDegree { degree: usize, bound: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("class {0} is not distinguished: its invariant measure is infinite")]
    InfiniteMeasureUnsupported(usize),
    #[error("unknown class id {0}")]
    UnknownClass(usize),
    #[error("vertex {vertex} out of range for a diagram with {size} vertices")]
    VertexOutOfRange { vertex: usize, size: usize },
    #[error("enumeration would visit {product} tuples, exceeding the budget {budget}")]
    EnumerationTooLarge { product: BigUint, budget: u64 },
    #[error("cannot parse field element: {0}")]
    Expr(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("construction of {size} vertices exceeds the size guard {guard}")]
    TooLarge { size: String, guard: usize },
    #[error("search failed: {reason} (last exponent tried: {last_exponent})")]
    SearchFailed { reason: String, last_exponent: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
