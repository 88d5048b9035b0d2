//! Multiscale detection and localization of jumps in the piecewise-smooth
//! mean of a high-dimensional time series with dependent, nonstationary noise.
//!
//! The pipeline: a jump-pass filter scanned over a sparse dyadic grid of
//! scales turns each candidate (dimension, time, scale) into a studentized
//! statistic; a block multiplier bootstrap calibrates the family-wise
//! threshold; detections are peeled off iteratively with exclusion windows;
//! an optional CUSUM second stage sharpens each location estimate.
//!
//! `no_std`-compatible (requires `alloc`); enable the `libm` feature when
//! building without `std`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(feature = "std", test))]
extern crate std;

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("ajdn-core needs either the `std` or the `libm` feature");

pub mod bootstrap;
pub mod detector;
pub mod error;
pub mod evaluate;
pub mod filter;
pub(crate) mod math;
pub mod panel;
pub mod refine;
pub mod rng;
pub mod scales;
pub mod simulate;
pub mod tuning;
pub mod validate;
pub mod variance;

pub use error::Error;
pub use panel::TimeSeriesPanel;
