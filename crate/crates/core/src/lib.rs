//! Learn "change these code metrics" plans from versioned defect datasets and
//! score them against what developers actually did in later releases.
//!
//! The crate is organised bottom-up:
//!
//! * [`data`] loads Jureczko-style CSV releases and diffs consecutive versions.
//! * [`stats`] holds entropy, univariate logistic regression and Simpson's rule.
//! * [`discretize`] implements Fayyad–Irani MDLP binning.
//! * [`dtree`] grows the defect-scored decision tree used by XTREE.
//! * [`planners`] contains XTREE plus the Alves, Shatnawi and Oliveira baselines.
//! * [`bellwether`] discovers the exemplar project of a community (BELLTREE).
//! * [`eval`] computes overlap, runs the K-test and integrates AUPEC.
//! * [`refhints`] maps metric deltas back to candidate refactorings.
//! * [`synth`] generates planted datasets for tests and demos.

pub mod action;
pub mod bellwether;
pub mod data;
pub mod discretize;
pub mod dtree;
pub mod error;
pub mod eval;
pub mod metric;
pub mod planners;
pub mod refhints;
pub mod stats;
pub mod synth;

pub use action::{ActionVector, Direction};
pub use error::{Error, Result};
pub use metric::{Metric, MetricValues, METRIC_COUNT};
