//! Partial information decomposition of group-fairness gaps.
//!
//! [`dist`] holds joint distributions of `(Z, Ŷ, Y)` and plug-in
//! information measures, [`pid`] the unique-information solver and the
//! decomposition built on it, [`fairness`] the gap audit and its theorem
//! checks. [`scenario`], [`ingest`] and [`report`] produce inputs and
//! serialize results.

pub mod dist;
pub mod error;
pub mod fairness;
pub mod ingest;
pub mod lp;
pub mod pid;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
