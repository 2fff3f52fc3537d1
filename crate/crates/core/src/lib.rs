//! Space-splitting user selection for MU-MIMO uplink scheduling.
//!
//! The crate provides the space-splitting selector ([`selectors::ss_us`])
//! together with the SUS, greedy ZF, mCore+ and random baselines, an
//! exhaustive small-instance oracle, closed-form cost models, and a seeded
//! Monte Carlo harness that scores every selector by zero-forcing sum
//! spectral efficiency on i.i.d. Rayleigh channels.

pub mod channel;
pub mod complexity;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod seeding;
pub mod selectors;

pub use channel::{generate_iid_rayleigh, ChannelMatrix, LinkBudget};
pub use error::{Error, Result};
pub use numerics::{ComplexVector, OpLedger, OrthonormalBasis};
pub use selectors::{select, Algorithm, SelectionConfig, SelectionResult};
