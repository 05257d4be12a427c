use thiserror::Error;

use crate::coordinate_ring::RingContext;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context mismatch: {left} vs {right}")]
    ContextMismatch { left: RingContext, right: RingContext },

    #[error("invalid context (n={n}, arity={arity}): {reason}")]
    InvalidContext {
        n: usize,
        arity: usize,
        reason: &'static str,
    },

    #[error("coordinate index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("letter of arity {found} used where arity {expected} is required")]
    ArityMismatch { expected: usize, found: usize },

    #[error("tuple letters must have at least one index")]
    EmptyLetter,

    #[error("series is not invertible: constant term is {0}, expected 1")]
    NotUnipotent(String),

    #[error("a commutator needs at least 2 entries, got {0}")]
    TooFewCommutatorEntries(usize),

    #[error("James-Hopf degree must be at least 1, got {0}")]
    InvalidHopfDegree(usize),

    #[error("pointwise James-Hopf map needs pairwise distinct letters; {0} repeats")]
    RepeatedLetter(usize),

    #[error("grouped-shuffle map only accepts exponents +1/-1, got {0}")]
    ExponentNotUnit(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("beta_n is defined for n >= 2, got {0}")]
    BetaWeight(usize),

    #[error("{p} divides {n}; the idempotent (1/{n}) beta_{n} does not exist mod {p}")]
    CharacteristicDividesWeight { p: u64, n: usize },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("series must have zero constant term")]
    NonzeroConstantTerm,

    #[error("series truncation degrees differ: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("division by a series with constant term {0}, expected 1")]
    NonUnitDivisor(String),

    #[error("exponent sequence violates {condition}: {detail}")]
    InvalidExponentSequence {
        condition: &'static str,
        detail: String,
    },

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),
}
