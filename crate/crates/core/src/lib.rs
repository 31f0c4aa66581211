//! Multi-label Takagi-Sugeno-Kang fuzzy systems.
//!
//! The model maps instances through Gaussian fuzzy rules learned by Fuzzy
//! C-Means, then fits a consequent matrix by accelerated proximal gradient
//! descent under a least-squares + L1 + label-correlation objective. The
//! crate also ships the multi-label evaluation metrics and rank-based
//! statistical tests used to compare methods, plus a command-line front end
//! for training, cross-validation, grid search, and analysis exports.

pub mod antecedent;
pub mod cli;
pub mod correlation;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod fuzzify;
pub mod model;
pub mod numfmt;
pub mod solver;

pub use error::{Error, Result};
