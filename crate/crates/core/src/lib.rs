//! macrodyn — fitting, simulation, and statistical testing of long-run
//! world population and GDP growth.
//!
//! The library ingests Maddison-style historical estimates and provides:
//!
//! - blow-up trend evaluation and least-squares fitting
//!   ([`trend`], [`fitting`]),
//! - dynamical-system simulators for the coupled population/surplus
//!   economy and its technology-coupled and baseline variants
//!   ([`dynamics`]),
//! - regression/correlation statistics with Student-t significance
//!   ([`stats`]),
//! - and a reproduction report that reruns the published analyses against
//!   the bundled dataset ([`report`]).
//!
//! The `macrodyn` binary exposes all of it as `fit`, `simulate`, `stats`,
//! and `reproduce` subcommands.

pub mod dataset;
pub mod dynamics;
pub mod error;
pub mod fitting;
pub mod report;
pub mod stats;
pub mod trend;

pub use dataset::{load_dataset, MacroDataset, YearValueSeries};
pub use error::{Error, Result};
pub use fitting::{fit_trend, fit_trend_with, goodness_of_fit, TrendFit};
pub use trend::{eval_trend, TrendParams};
