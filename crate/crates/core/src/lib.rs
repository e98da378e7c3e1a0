//! Kinematic strata of Mandelstam matrices.
//!
//! A Mandelstam matrix is the Gram matrix of momentum vectors under the
//! Minkowski product. Its off-diagonal sign pattern, together with the
//! pattern of zeros, places it in a stratum indexed by a signed rank-two
//! matroid and the matrix rank. This crate decides region membership,
//! classifies massless matrices into strata, counts strata by dimension,
//! and builds explicit momentum configurations in any nonempty stratum.
//!
//! Modules, bottom-up:
//!
//! - [`exactmat`]: symmetric matrices over exact rationals or floats,
//!   principal minors, rank, eigen-signature and the membership test.
//! - [`matroid`]: rank-two matroids as partitions with loops, sign vectors
//!   modulo global negation, the signed poset and Stirling numbers.
//! - [`census`]: nonemptiness predicates, dimension formulas and
//!   closed-form/brute-force stratum counts.
//! - [`classify`]: matrix to stratum label.
//! - [`realize`]: sampling configurations in a stratum, numerical
//!   dimension checks, cyclic orders and closure perturbations.
//! - [`regioncheck`]: exact verifiers for the four- and five-particle
//!   momentum-conserving regions.
//! - [`poset`]: Hasse diagrams of the stratum posets.

pub mod census;
pub mod classify;
pub mod exactmat;
pub mod matroid;
pub mod poset;
pub mod realize;
pub mod regioncheck;
mod sign;
mod util;

pub use sign::Sign;

/// Seed used whenever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED_2024;
