use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("modulus {p}^{n} does not fit in 32 bits")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: u64, modulus: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("submodule is not contained in the ambient module")]
    NotContained,
    #[error("root is not simple modulo p (derivative vanishes)")]
    NonSimpleRoot,
    #[error("value is not a root modulo p")]
    NotARoot,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("group closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("element order {order} does not divide {bound}")]
    OrderDoesNotDivide { order: u64, bound: u64 },
    #[error("the p-power-order elements do not form a subgroup")]
    NoNormalSylow,
    #[error("reduction level {level} is out of range 1..={n}")]
    BadLevel { level: u32, n: u32 },
    #[error("not a subgroup of the parent group")]
    NotSubgroup,
    #[error("element does not commute with the group")]
    NotCentral,
    #[error("no diagonal lift of the mod-p semisimple part exists")]
    NoRhoLift,
    #[error("group of order {order} exceeds the cohomology budget of {budget}")]
    BudgetExceeded { order: usize, budget: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("decomposition certificate failed: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
