//! Trimmed-moment estimation and heavy-tail-robust confidence intervals.
//!
//! This crate implements inference built on the empirical process of a
//! sample after discarding a fraction of extreme order statistics. Trimming
//! restores finite moments for heavy-tailed data, so means and variances of
//! the trimmed population can be estimated — and equipped with asymptotic
//! confidence intervals — even when the underlying distribution has no
//! moments at all.
//!
//! The pieces:
//!
//! * [`trimming`] — trim specifications (symmetric, one-sided, explicit
//!   index windows) and order-statistic windows over sorted samples.
//! * [`estimators`] — trimmed means, variances, central moments, the
//!   variance-of-variance plug-in, and distribution-shape diagnostics.
//! * [`inference`] — one- and two-sample confidence intervals for trimmed
//!   means, variances, mean differences, and variance ratios.
//! * [`distributions`] — samplers and population trimmed-moment oracles for
//!   the reference families (normal, log-normal, Pareto, Student t, Cauchy).
//! * [`montecarlo`] — deterministic, parallel simulation studies: interval
//!   tables on synthetic data and coverage experiments.
//! * [`dataset`] — CSV ingestion for real data.
//! * [`report`] — CSV / JSON / markdown rendering of results.
//! * [`cli`] — the `tfep` command-line tool built from the above.

pub mod cli;
pub mod dataset;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod montecarlo;
pub mod report;
pub mod seed;
pub mod trimming;

mod quadrature;
mod special;

pub use error::{Error, Result};
pub use seed::Seed;
