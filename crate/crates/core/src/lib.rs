//! Operator-valued reproducing kernels, refinement checks between their
//! RKHSs, and multi-task regularization networks.
//!
//! - [`matcore`]: symmetric matrices, PSD tests, square roots, the order `A ⪯ B`.
//! - [`kernels`]: kernel families, Gram matrices, scalarization.
//! - [`refinement`]: closed-form refinement predicates and a numerical oracle.
//! - [`regnet`]: the regularization-network solver.
//! - [`experiments`]: the underfitting/overfitting Monte-Carlo studies.
//! - [`plot`], [`cli`]: SVG output and the `opkern` command.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod matcore;
pub mod plot;
pub mod refinement;
pub mod regnet;

pub use error::{Error, Result};
