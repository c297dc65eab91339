//! Fractional lower-order covariation measures for heavy-tailed periodically
//! correlated time series: simulation, estimation, testing and order selection.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod error;
pub mod exec;
pub mod flocmeasures;
pub mod heavytail;
pub mod inference;
pub mod io;
pub mod pipeline;
pub mod procgen;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use flocmeasures::{FlocEstimator, Measure, NullBands, SeasonalLagTable};
pub use heavytail::{FlocParams, StableParams};
pub use procgen::{PeriodicModel, PeriodicSeries};
pub use rng::Substreams;
