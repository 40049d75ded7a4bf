//! Discretization of return series into finite-alphabet symbol sequences.
//!
//! A value maps to the number of bin edges that are `<=` it, so bins are
//! left-closed/right-open and the last bin is closed on the right (it takes
//! everything from the top edge upward).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{InstrumentMeta, ReturnSeries};

/// Largest supported alphabet; symbols are stored as `u8`.
pub const MAX_ALPHABET: usize = 256;

#[derive(Debug, Error, PartialEq)]
pub enum SymbolizeError {
    #[error("bin edges must be finite and strictly increasing: {0:?}")]
    UnorderedEdges(Vec<f64>),
    #[error("at least one bin edge is required")]
    NoEdges,
    #[error("quantile level {0} is outside (0, 1)")]
    LevelOutOfRange(f64),
    #[error("alphabet of {0} symbols exceeds the supported maximum of 256")]
    AlphabetTooLarge(usize),
    #[error("cannot symbolize an empty series")]
    Empty,
    #[error("{ticker}: quantile levels {lower} and {upper} give the same edge {edge}")]
    DegenerateQuantiles {
        ticker: String,
        lower: f64,
        upper: f64,
        edge: f64,
    },
    #[error("{ticker}: {distinct} distinct values cannot fill {alphabet} quantile bins")]
    TooFewDistinct {
        ticker: String,
        distinct: usize,
        alphabet: usize,
    },
    #[error("symbol {symbol} at position {position} is outside an alphabet of {alphabet}")]
    SymbolOutOfRange {
        symbol: u8,
        position: usize,
        alphabet: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Edges are empirical quantiles of the series at the given levels.
    Quantile,
    /// Edges are used as raw thresholds.
    FixedThresholds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolScheme {
    kind: SchemeKind,
    bin_edges: Vec<f64>,
}

impl SymbolScheme {
    pub fn quantile(levels: Vec<f64>) -> Result<Self, SymbolizeError> {
        if let Some(&bad) = levels.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(SymbolizeError::LevelOutOfRange(bad));
        }
        Self::build(SchemeKind::Quantile, levels)
    }

    pub fn thresholds(thresholds: Vec<f64>) -> Result<Self, SymbolizeError> {
        Self::build(SchemeKind::FixedThresholds, thresholds)
    }

    /// `bins` equiprobable quantile bins (levels `i / bins`).
    pub fn equiprobable(bins: usize) -> Result<Self, SymbolizeError> {
        if bins < 2 {
            return Err(SymbolizeError::NoEdges);
        }
        Self::quantile((1..bins).map(|i| i as f64 / bins as f64).collect())
    }

    fn build(kind: SchemeKind, bin_edges: Vec<f64>) -> Result<Self, SymbolizeError> {
        if bin_edges.is_empty() {
            return Err(SymbolizeError::NoEdges);
        }
        if bin_edges.len() + 1 > MAX_ALPHABET {
            return Err(SymbolizeError::AlphabetTooLarge(bin_edges.len() + 1));
        }
        let ordered = bin_edges.iter().all(|e| e.is_finite())
            && bin_edges.windows(2).all(|w| w[0] < w[1]);
        if !ordered {
            return Err(SymbolizeError::UnorderedEdges(bin_edges));
        }
        Ok(Self { kind, bin_edges })
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn alphabet_size(&self) -> usize {
        self.bin_edges.len() + 1
    }
}

impl Default for SymbolScheme {
    /// Three-state tail coding: lower 5% tail, body, upper 5% tail.
    fn default() -> Self {
        Self::quantile(vec![0.05, 0.95]).expect("valid default levels")
    }
}

/// Integer-coded series; every symbol is below `alphabet_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSeries {
    meta: InstrumentMeta,
    symbols: Vec<u8>,
    alphabet_size: usize,
}

impl SymbolSeries {
    pub fn new(meta: InstrumentMeta, symbols: Vec<u8>, alphabet_size: usize) -> Result<Self, SymbolizeError> {
        if alphabet_size > MAX_ALPHABET {
            return Err(SymbolizeError::AlphabetTooLarge(alphabet_size));
        }
        if let Some((position, &symbol)) = symbols
            .iter()
            .enumerate()
            .find(|(_, &s)| s as usize >= alphabet_size)
        {
            return Err(SymbolizeError::SymbolOutOfRange {
                symbol,
                position,
                alphabet: alphabet_size,
            });
        }
        Ok(Self {
            meta,
            symbols,
            alphabet_size,
        })
    }

    /// Same alphabet and metadata, different symbols. Used for surrogates.
    pub(crate) fn with_symbols(&self, symbols: Vec<u8>) -> Self {
        debug_assert!(symbols.iter().all(|&s| (s as usize) < self.alphabet_size));
        Self {
            meta: self.meta.clone(),
            symbols,
            alphabet_size: self.alphabet_size,
        }
    }

    pub fn meta(&self) -> &InstrumentMeta {
        &self.meta
    }

    pub fn ticker(&self) -> &str {
        &self.meta.ticker
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Empirical quantile by linear interpolation between order statistics
/// (position `(n - 1) p` in the sorted sample).
pub fn empirical_quantile(sorted: &[f64], level: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() || frac == 0.0 {
        return sorted[lo.min(sorted.len() - 1)];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Resolves the scheme into concrete edges for this series.
pub fn resolve_edges(returns: &ReturnSeries, scheme: &SymbolScheme) -> Result<Vec<f64>, SymbolizeError> {
    if returns.is_empty() {
        return Err(SymbolizeError::Empty);
    }
    match scheme.kind {
        SchemeKind::FixedThresholds => Ok(scheme.bin_edges.clone()),
        SchemeKind::Quantile => {
            let mut sorted = returns.values().to_vec();
            sorted.sort_by(f64::total_cmp);
            let edges: Vec<f64> = scheme
                .bin_edges
                .iter()
                .map(|&p| empirical_quantile(&sorted, p))
                .collect();
            for (i, w) in edges.windows(2).enumerate() {
                if w[0] >= w[1] {
                    return Err(SymbolizeError::DegenerateQuantiles {
                        ticker: returns.ticker().to_string(),
                        lower: scheme.bin_edges[i],
                        upper: scheme.bin_edges[i + 1],
                        edge: w[0],
                    });
                }
            }
            let mut distinct = sorted;
            distinct.dedup();
            if distinct.len() < scheme.alphabet_size() {
                return Err(SymbolizeError::TooFewDistinct {
                    ticker: returns.ticker().to_string(),
                    distinct: distinct.len(),
                    alphabet: scheme.alphabet_size(),
                });
            }
            Ok(edges)
        }
    }
}

pub fn symbolize(returns: &ReturnSeries, scheme: &SymbolScheme) -> Result<SymbolSeries, SymbolizeError> {
    let edges = resolve_edges(returns, scheme)?;
    let symbols = returns
        .values()
        .iter()
        .map(|&v| edges.partition_point(|&e| e <= v) as u8)
        .collect();
    SymbolSeries::new(returns.meta().clone(), symbols, scheme.alphabet_size())
}

/// Occurrences of each symbol; sums to the series length.
pub fn histogram(series: &SymbolSeries) -> Vec<usize> {
    let mut counts = vec![0; series.alphabet_size];
    for &s in &series.symbols {
        counts[s as usize] += 1;
    }
    counts
}
