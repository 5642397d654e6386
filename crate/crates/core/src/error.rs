use thiserror::Error;

use crate::field::FieldSpec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidModulus(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("element is not a square")]
    NotASquare,
    #[error("cannot enumerate an infinite field")]
    InfiniteField,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("subspaces live in different ambient spaces")]
    AmbientMismatch,
    #[error("induced form is not well defined: denominator is not orthogonal to numerator")]
    NotWellDefined,
    #[error("vector or subspace lies outside the domain")]
    OutOfDomain,
    #[error("maps disagree on the intersection of their domains")]
    DisagreeOnIntersection,
    #[error("domains (or images) are not orthogonal")]
    NotOrthogonal,
    #[error("domains (or images) intersect nontrivially")]
    Overlap,
    #[error("map is not an isometry")]
    NotIsometry,
    #[error("space is singular")]
    SingularSpace,
    #[error("unsupported by the arithmetic backend: {0}")]
    BackendUnsupported(String),
    #[error("isometry cannot be extended: ambient spaces are not isometric")]
    NotExtendable,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("ambient spaces are not isometric")]
    NotIsometricAmbients,
    #[error("extension conditions do not hold")]
    ConditionsNotMet,
    #[error("split hypothesis (E+A^perp)∩A = E∩A violated")]
    SplitHypothesisViolated,
    #[error("not a direct sum decomposition")]
    NotDirectSum,
    #[error("flag is not compatible with the maximal isotropic subspace")]
    NotCompatible,
    #[error("flag is not self-dual")]
    FlagNotSelfDual,
    #[error("flags are not isometric")]
    FlagsNotIsometric,
    #[error("subspace is not totally isotropic")]
    NotTotallyIsotropic,
    #[error("invalid flag: {0}")]
    InvalidFlag(String),
    #[error("invalid Witt decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("search space too large ({0} candidates)")]
    SearchSpaceTooLarge(u128),
    #[error("closure pairing is incomplete")]
    PairingIncomplete,
    #[error("internal assertion failed: {0}")]
    AssertionFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }

    pub(crate) fn assertion(msg: impl Into<String>) -> Self {
        Error::AssertionFailure(msg.into())
    }
}
