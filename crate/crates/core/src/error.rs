use thiserror::Error;

use crate::space::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("points must have at least one coordinate")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {0} is outside the supported range ±2^62")]
    CoordinateOutOfRange(i64),

    #[error("empty interval [{a},{b}]")]
    EmptyInterval { a: i64, b: i64 },

    #[error("space would have {0} points, more than the supported maximum")]
    SpaceTooLarge(u128),

    #[error("a box needs at least one coordinate range")]
    EmptyBox,

    #[error("point index {index} out of range for a space with {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("table has {found} entries, domain has {expected} points")]
    TableNotTotal { expected: usize, found: usize },

    #[error("invalid space: {} violation(s), first: {}", .0.len(), .0[0])]
    InvalidSpace(Vec<Violation>),

    #[error("space has no Khalimsky embedding")]
    NotKhalimsky,

    #[error("shift {0} exceeds the rule limit ±2^61")]
    ShiftOutOfRange(i64),

    #[error("enumeration needs {required} tables, limit is {limit}; use sampling")]
    BudgetExceeded { required: String, limit: u64 },

    #[error("diagram nesting violated: {0}")]
    NestingViolation(String),
}
