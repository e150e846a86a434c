//! Shaping-rate requirements and achievable-rate bounds for shaped subcodes
//! selected from i.i.d. random codebooks under single-letter constraints.
//!
//! The crate is organised bottom-up:
//!
//! - [`info`]: pmfs, channels, entropy, divergence and mutual information (bits).
//! - [`projection`]: I-projection onto a constraint set, minimum shaping rate,
//!   Sanov bounds and exact type-class oracles.
//! - [`rates`]: matched, naive, Gallager-exponent and modified-joint-typicality rates.
//! - [`channels`]: BSC, BNSC, quantized AWGN with PAM inputs, scaling optimisation,
//!   the Gaussian large-codebook case and a constrained Blahut-Arimoto baseline.
//! - [`montecarlo`]: simulation of random set selection and ML decoding.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channels;
pub mod error;
pub mod info;
pub mod montecarlo;
pub mod projection;
pub mod rates;

pub use error::{Error, Result};
pub use info::{Channel, JointPmf, Pmf};
pub use projection::{ConstraintSet, ProjectionResult};
