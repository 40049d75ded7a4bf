//! Directional information flow between financial time series.
//!
//! The pipeline runs in five stages, one module each:
//!
//! 1. [`ingest`] loads daily closes, computes log returns and descriptive
//!    statistics, and aligns pairs of return series on common dates.
//! 2. [`symbolize`] turns returns into finite-alphabet symbol sequences.
//! 3. [`entropy`] embeds symbol pairs into joint block tables and evaluates the
//!    plug-in transfer entropy in bits.
//! 4. [`inference`] corrects the estimate with shuffled surrogates (effective
//!    transfer entropy) and attaches bootstrap standard errors and p-values.
//! 5. [`flow`] runs every in-scope directed pair and exports matrices,
//!    net-flow differences and a dominance graph.
//!
//! Direction convention: everything is phrased as `TE(source -> destination)`,
//! the information the source's history adds about the destination's next
//! value. [`entropy::directed_te`] takes the destination first, mirroring the
//! usual `TE_{Y->X}` notation with `x` as the destination.

pub mod entropy;
pub mod error;
pub mod export;
pub mod flow;
pub mod inference;
pub mod ingest;
pub mod rng;
pub mod symbolize;

pub use error::{Error, Result};
