//! Skew products on the circle times the Heisenberg nilmanifold, with the
//! arithmetic, Fourier and covering tools needed to study their orbits.

pub mod arith;
pub mod complexity;
pub mod flows;
pub mod heisenberg;
pub mod num;
pub mod observables;
pub mod periodic;
