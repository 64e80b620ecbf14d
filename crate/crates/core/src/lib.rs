//! Sparse aggregation of function dictionaries by weighted ℓ₁-penalized least
//! squares, with Gram/coherence diagnostics, oracle constructions, explicit
//! tail bounds and a seeded Monte Carlo harness.

pub mod dictionary;
pub mod error;
pub mod experiments;
pub mod gram;
pub mod io;
pub mod measure;
pub mod oracle;
pub mod population;
pub mod solver;
pub mod stats;
pub mod truth;

pub use error::{Error, Result};

#[cfg(test)]
#[path = "../tests/common/oracles.rs"]
#[allow(dead_code)]
mod test_oracles;
