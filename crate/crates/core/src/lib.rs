//! Weighted Hermite and power variations of fractional Brownian motion.
//!
//! This crate is `no_std` (it needs `alloc`). It contains everything that is
//! a pure function of its inputs:
//!
//! * exact fBm sampling on dyadic grids ([`fbm`]), by circulant embedding or
//!   by a dense Cholesky factor,
//! * Hermite polynomial algebra in the `H_q = He_q / q!` normalization
//!   ([`hermite`]),
//! * the limit constants and the `(H, q)` regime classifier ([`constants`]),
//! * weighted Hermite/power variations, their renormalizations and the
//!   deterministic diagnostic sums ([`variations`]),
//! * the discrete Hermite process approximation and left-point Young sums
//!   ([`hermite_process`]),
//! * the small amount of statistics the Monte Carlo checks need ([`stats`]).
//!
//! IO, file formats, parallel experiments and the CLI live in the `fbmvar`
//! crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod constants;
pub mod error;
pub mod fbm;
pub mod fft;
pub mod hermite;
pub mod hermite_process;
pub mod numeric;
pub mod rng;
pub mod stats;
pub mod variations;
pub mod weight;

pub use constants::{classify_regime, LimitKind, RegimeCase, ScalingRegime, TruncatedSeries};
pub use error::{Error, Result};
pub use fbm::{CholeskySampler, CirculantSampler, FbmPath, Hurst};
pub use hermite::{gaussian_moment, hermite_eval, monomial_in_hermite, HermiteCoefficients};
pub use hermite_process::{simulate_hermite, young_integral, HermiteApprox};
pub use variations::{
    diagnostic_sums, renormalize, weighted_hermite_variation, weighted_power_variation,
    DiagnosticSums, VariationStatistic,
};
pub use weight::WeightFunction;
