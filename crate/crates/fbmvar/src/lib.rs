//! Weighted Hermite and power variations of fractional Brownian motion:
//! file formats, seeded Monte Carlo experiments and the `fbmvar` command line.
//!
//! The numerical core lives in [`fbmvar_core`] (re-exported as [`core`]) and
//! works without `std`; this crate adds threads, files and reports.

pub mod cli;
pub mod config;
pub mod dft;
pub mod error;
pub mod experiments;
pub mod io;
pub mod numfmt;
pub mod parallel;
pub mod report;

pub use fbmvar_core as core;
