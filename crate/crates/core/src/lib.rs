//! Altered-fingerprint verification: embed real and altered fingerprint
//! images, compare them by cosine similarity under configurable thresholds,
//! and summarise how the decision threshold moves accuracy, F1 and cost.
//!
//! The runnable programs under `examples/` walk through each stage.

pub mod cli;
pub mod dataset;
pub mod eval;
pub mod features;
pub mod matcher;
pub mod pixels;
mod report_fmt;
pub mod stats;

pub use report_fmt::{fixed, round_to};
