//! Skew products over a circle rotation, their Birkhoff sums and the
//! conjugations that remove the non-resonant part of the cocycle.

mod birkhoff;
mod classa;
mod conjugacy;
mod resonant;
mod skew;

pub use birkhoff::{birkhoff_series, birkhoff_sums, state_from_sums, BirkhoffSums, BlockSums};
pub use classa::{closed_form_class_a, omega_kernel, typical_value};
pub use conjugacy::{conjugation_residual, ConjugacySetup, Conjugator};
pub use resonant::{geometric_mode_sum, lemma43_sup, mode_sum_series, resonant_sums, ResonantSums};
pub use skew::{OrbitIter, SkewKind, SkewProduct, SkewProductSpec};

use thiserror::Error;

use crate::arith::ArithError;
use crate::periodic::PeriodicError;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("the mean-zero hypothesis fails: mean(phi) = {0:e}")]
    NonZeroMean(f64),
    #[error("rotation number must be rational for {0}")]
    NotRational(&'static str),
    #[error("{0} is only defined for skew products of kind {1}")]
    WrongKind(&'static str, &'static str),
    #[error("block model for residue {b} misses the check point by {deviation:e}")]
    BlockModel { b: u64, deviation: f64 },
    #[error(transparent)]
    Periodic(#[from] PeriodicError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}
