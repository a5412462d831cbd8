//! Visibility-based binary hypothesis testing for two-port photon counting.
//!
//! The crate models the joint photocount statistics at the outputs of a
//! balanced beam splitter, with or without a shared phase reference, and
//! builds on them:
//!
//! - [`photostat`]: exact joint count distributions, dark counts, truncation.
//! - [`chernoff`]: Chernoff information, the Chernoff bound and its refinement.
//! - [`energyopt`]: information per detected photon and its optimum energy.
//! - [`simkit`]: Monte Carlo Neyman–Pearson tests and empirical error rates.
//! - [`fingerprint`]: code rates and quantum-fingerprinting crossover lengths.
//! - [`tagio`]: time-tag ingestion, window binning and theory comparison.
//! - [`cli`]: the `vistest` command-line front end.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

// Negated comparisons double as NaN rejection in argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chernoff;
pub mod cli;
pub mod energyopt;
pub mod error;
pub mod fingerprint;
pub mod optim;
pub mod photostat;
pub mod simkit;
pub mod tagio;

pub use error::{Error, Result};
