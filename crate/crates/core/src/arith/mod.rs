//! Number-theoretic substrate: the Mobius function, twisted exponential sums
//! and continued fractions of the rotation number.

mod alpha;
mod cf;
mod hua;
mod mobius;

pub use alpha::{AlphaSpec, Dd, Rotation};
pub use cf::{
    cf_expand, classify_denominators, in_m1, CfStop, ContinuedFraction, Convergent,
    DenominatorClassification, Period, Termination,
};
pub use hua::{hua_sum, hua_sums_at, PolyPhase, MAX_DEGREE, RESEED_INTERVAL};
pub use mobius::{mertens, mobius_sieve, mobius_sieve_with_cap, MobiusTable, DEFAULT_SIEVE_CAP};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("invalid rotation number: {0}")]
    InvalidAlpha(String),
    #[error("sieve limit {requested} exceeds the capacity cap {cap}")]
    SieveCapacity { requested: u64, cap: u64 },
    #[error("sieve limit must be at least 1")]
    EmptySieve,
    #[error("{n} is outside the table range 1..={limit}")]
    OutOfRange { n: u64, limit: u64 },
    #[error("continued fraction has {have} convergents, need at least {need}")]
    InsufficientTerms { have: usize, need: usize },
    #[error("exponent B = {0} must be a finite real greater than 2")]
    InvalidExponent(f64),
    #[error("membership of m = {m} is undetermined: the largest computed denominator is {largest_q}; expand more terms")]
    UndeterminedMembership { m: i128, largest_q: u128 },
    #[error("polynomial degree {0} is not supported (at most {MAX_DEGREE})")]
    UnsupportedDegree(usize),
    #[error("non-finite polynomial coefficient {0}")]
    NonFiniteCoefficient(f64),
    #[error("residue {a} is not in 0..{q}")]
    InvalidProgression { a: u64, q: u64 },
    #[error("malformed Mobius table: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
