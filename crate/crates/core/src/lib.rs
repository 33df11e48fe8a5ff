//! Word-occurrence statistics for time-stamped text streams.
//!
//! Posts are reduced to a [`WordDayMatrix`]: for each word, the number of
//! posts per day that contain it. On top of that matrix:
//!
//! - [`rank`]: rank-frequency curves and the modified power-law fit, with
//!   Zipf and Zipf-Mandelbrot baselines.
//! - [`ensembles`]: words grouped by total count `k`.
//! - [`waiting`]: inter-event times inside each ensemble, risk functions,
//!   the moment ratio `ζ = ⟨τ²⟩/⟨τ⟩²` and stretched-exponential fits.
//! - [`dense`]: standardized daily counts of frequent words against a
//!   box-allocation null.
//! - [`null_models`]: seeded synthetic corpora (Poisson, heterogeneous
//!   Poisson, stretched-exponential renewal).
//! - [`ingest`]: RSS scan diffing, flat corpora, missed-scan cleaning.
//!
//! The `examples/` directory has one runnable program per capability, e.g.
//! `cargo run --release --example mixing_artifact`.

pub mod cli;
pub mod dense;
pub mod ensembles;
pub mod ingest;
pub mod io;
pub mod matrix;
pub mod null_models;
pub mod optimize;
pub mod quadrature;
pub mod rank;
pub mod rng;
pub mod stats;
pub mod stretched;
pub mod waiting;

pub use matrix::{WordDayMatrix, WordSeries};
