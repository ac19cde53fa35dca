//! Synthesis and scaling analysis of self-similar traffic traces.
//!
//! The crate is organised along the analysis pipeline:
//!
//! - [`synth`]: fractional Gaussian noise, conservative binomial cascades and
//!   the cascade-modulated composite trace.
//! - [`aggregate`]: non-overlapping block sums `X^(n)` and dyadic pyramids.
//! - [`cumulant`]: unbiased k-statistics per aggregation scale.
//! - [`scaling`]: log-log regressions of `|cum_m X^(n)|` against `n`, the
//!   `H(m)` spectrum, sliding-window locality curves and knee detection.
//! - [`wavelet`]: periodic orthonormal DWT and logscale-diagram estimation.
//! - [`io`]: CSV traces with a JSON metadata sidecar, and plot-ready CSV
//!   curves.

pub mod aggregate;
pub mod cumulant;
mod error;
pub mod io;
pub mod numeric;
pub mod rng;
pub mod scaling;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
pub use synth::{ModelSpec, Trace, TraceMeta};
