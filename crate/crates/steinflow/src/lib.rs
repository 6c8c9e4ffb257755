//! Particle-based variational inference with multiple-kernel Stein
//! variational gradient descent (MK-SVGD).
//!
//! The crate provides:
//!
//! * RBF base kernels with analytic derivatives and a weighted multi-kernel
//!   combiner ([`kernel`]),
//! * empirical kernelized Stein discrepancy (KSD) estimators, their
//!   multi-kernel extension (MKSD), and the closed-form optimal kernel
//!   weights ([`discrepancy`]),
//! * the SVGD / MK-SVGD particle dynamics with AdaGrad step control
//!   ([`dynamics`]),
//! * score-function target models: multivariate Gaussian, hierarchical
//!   Bayesian logistic regression, and a one-hidden-layer Bayesian neural
//!   network ([`targets`]),
//! * dataset ingestion and minibatching ([`data`]), ensemble evaluation
//!   metrics ([`metrics`]), and an experiment runner ([`cli`]).
//!
//! The `steinflow` binary wraps the experiment runner with `gaussian`,
//! `logreg` and `bnn` subcommands.

pub mod cli;
pub mod data;
pub mod discrepancy;
pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod metrics;
pub mod targets;

pub use error::{Error, Result};
