use thiserror::Error;

/// Errors raised by lattice construction and the embedding pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis rows have inconsistent lengths: {0}")]
    DimensionMismatch(String),
    #[error("basis is singular (|det| = {det:e})")]
    SingularBasis { det: f64 },
    #[error("basis condition number {cond:e} exceeds {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },
    #[error("operation requires dimension {expected}, lattice has dimension {found}")]
    UnsupportedDimension { expected: String, found: usize },
    #[error("vector is not a lattice vector (coordinates {coords:?})")]
    NotALatticeVector { coords: Vec<f64> },
    #[error("Voronoi cell consistency check failed: {0}")]
    CellInconsistent(String),
    #[error("vectors {u:?} and {v:?} are not a same-coset pair")]
    NotSameCosetPair { u: Vec<i64>, v: Vec<i64> },
    #[error("weight order violated: z(v) = {zv} > z(u) = {zu}")]
    WeightOrderViolation { zu: f64, zv: f64 },
    #[error("{u:?} is not {k} times {v:?}")]
    NotAMultiple { u: Vec<i64>, v: Vec<i64>, k: i64 },
    #[error("vector {0:?} is not in the support")]
    NotInSupport(Vec<i64>),
    #[error("invalid weight function: {0}")]
    InvalidWeights(String),
    #[error("support reduction did not terminate within {0} steps")]
    NonTermination(usize),
    #[error("obtuse superbasis check failed: {0}")]
    SuperbasisInvalid(String),
    #[error("identity decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("distortion ratio denominator vanishes at x = {0:?}")]
    DivisionByZero([f64; 2]),
    #[error("most contracted point is the origin")]
    ZeroContractionPoint,
    #[error("factor list is empty")]
    EmptyFactorList,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
