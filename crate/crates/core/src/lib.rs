//! Decomposition of S-shaped time series into sums of logistic functions.
//!
//! An S-shaped series (a Gompertz growth trend, an adoption curve, a
//! saturating sensor reading) can often be written, to high accuracy, as a
//! short sum of logistic functions with different centers, widths and
//! saturation levels (a *multilogistic* function). This crate finds such a
//! decomposition:
//!
//! 1. take central second differences of the series ([`diffcwt::central_diff`]),
//! 2. correlate them against a grid of dilated/translated second-order
//!    logistic wavelets ([`diffcwt::scalogram`]),
//! 3. read candidate waves off the scalogram extrema ([`extract::find_extrema`]),
//!    estimate their saturation levels, subtract, and repeat on the residual
//!    ([`extract::decompose`]),
//! 4. optionally polish the model with a derivative-free minimax or
//!    least-squares search ([`refine::refine`]).
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature for embedded use. All operations are pure functions of their
//! inputs and safe to call concurrently.
//!
//! ```
//! use logwave_core::{GompertzParams, sample_curve};
//! use logwave_core::extract::{decompose, DecompositionConfig};
//!
//! let g = GompertzParams::new(100_000.0, 0.1, 50.0).unwrap();
//! let series = sample_curve(|t| g.eval(t), 0.0, 201.0, 1.0).unwrap();
//! let (model, _trace) = decompose(&series, &DecompositionConfig::default()).unwrap();
//! assert_eq!(model.waves.len(), 3);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod numeric;

pub mod diffcwt;
pub mod extract;
pub mod logwavelet;
pub mod refine;
pub mod scurve;

pub use error::{Error, Result};
pub use scurve::{
    sample_curve, GompertzParams, LogisticWave, MultilogisticModel, SampledSeries,
};
