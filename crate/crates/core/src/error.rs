use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor mismatch: {left} vs {right}")]
    ConductorMismatch { left: u32, right: u32 },
    #[error("conductor {from} does not divide {to}")]
    ConductorNotDivisor { from: u32, to: u32 },
    #[error("cannot parse cyclotomic number {input:?}: {reason}")]
    CycParse { input: String, reason: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("generators {0} and {1} do not commute")]
    NonCommuting(String, String),
    #[error("generator {0} does not commute with the complex structure")]
    NotComplexLinear(String),
    #[error("bad complex structure: {0}")]
    BadComplexStructure(String),
    #[error("group closure exceeds the bound of {0} elements")]
    InfiniteClosure(usize),
    #[error("generator {0} is not unimodular")]
    NonUnimodular(String),
    #[error("generator {name} has order {actual}, declared {declared}")]
    OrderMismatch { name: String, declared: u32, actual: u32 },
    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),
    #[error("unknown group element {0:?}")]
    UnknownElement(String),
    #[error("{small} is not contained in the subgroup generated by {large}")]
    NotASubgroupRelation { small: String, large: String },
    #[error("class is not homogeneous")]
    NotHomogeneous,
    #[error("class is not supported on a single sector")]
    SectorMismatch,
    #[error("obstruction rank for ({g}, {h}) is {k}, expected a non-negative integer")]
    NegativeK { g: String, h: String, k: String },
    #[error("scenario is not holomorphic symplectic: {0}")]
    NotHolomorphicSymplectic(String),
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("matrix of order exceeding {0}")]
    OrderBound(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
