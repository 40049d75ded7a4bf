//! Markov block embedding and the plug-in transfer entropy estimator.
//!
//! For a destination `x` and source `y`, each valid time `t` contributes one
//! triple `(x[t+1], x-block, y-block)` where the blocks are the `k` and `l`
//! most recent symbols ending at `t`, most recent first. Blocks are packed into
//! integers as `sum_i s[t - i] * alphabet^i`.
//!
//! Transfer entropy is then
//!
//! ```text
//! TE(y -> x) = sum p(n, xb, yb) * log2( p(n | xb, yb) / p(n | xb) )
//! ```
//!
//! with every probability a relative frequency of the observed triples.
//! Unobserved triples carry no mass and are skipped; no pseudo-counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbolize::SymbolSeries;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EntropyError {
    #[error("history lengths must be at least 1 (k = {k}, l = {l})")]
    InvalidOrder { k: usize, l: usize },
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("series of length {len} is too short for k = {k}, l = {l}")]
    TooShort { len: usize, k: usize, l: usize },
    #[error("block of {order} symbols over an alphabet of {alphabet} does not fit in 64 bits")]
    BlockOverflow { order: usize, alphabet: usize },
    #[error("joint table is empty")]
    EmptyTable,
}

/// History lengths: `k` for the destination, `l` for the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedParams {
    k: usize,
    l: usize,
}

impl EmbedParams {
    pub fn new(k: usize, l: usize) -> Result<Self, EntropyError> {
        if k == 0 || l == 0 {
            return Err(EntropyError::InvalidOrder { k, l });
        }
        Ok(Self { k, l })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Triples available from a series of length `len`.
    pub fn n_effective(&self, len: usize) -> usize {
        len.saturating_sub(self.k.max(self.l))
    }
}

impl Default for EmbedParams {
    fn default() -> Self {
        Self { k: 1, l: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripleKey {
    pub next: u8,
    pub x_block: u64,
    pub y_block: u64,
}

/// Counts of embedded triples and the marginals needed for the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    counts: BTreeMap<TripleKey, u64>,
    xy_counts: BTreeMap<(u64, u64), u64>,
    next_x_counts: BTreeMap<(u8, u64), u64>,
    x_counts: BTreeMap<u64, u64>,
    n_effective: u64,
}

impl JointTable {
    pub fn counts(&self) -> &BTreeMap<TripleKey, u64> {
        &self.counts
    }

    /// Counts of `(x_block, y_block)`.
    pub fn xy_counts(&self) -> &BTreeMap<(u64, u64), u64> {
        &self.xy_counts
    }

    /// Counts of `(next, x_block)`.
    pub fn next_x_counts(&self) -> &BTreeMap<(u8, u64), u64> {
        &self.next_x_counts
    }

    pub fn x_counts(&self) -> &BTreeMap<u64, u64> {
        &self.x_counts
    }

    pub fn n_effective(&self) -> u64 {
        self.n_effective
    }

    pub fn is_empty(&self) -> bool {
        self.n_effective == 0
    }

    fn from_triples(mut triples: Vec<TripleKey>) -> Self {
        triples.sort_unstable();
        let mut counts = BTreeMap::new();
        for chunk in triples.chunk_by(|a, b| a == b) {
            counts.insert(chunk[0], chunk.len() as u64);
        }
        let mut xy_counts = BTreeMap::new();
        let mut next_x_counts = BTreeMap::new();
        let mut x_counts = BTreeMap::new();
        for (key, &c) in &counts {
            *xy_counts.entry((key.x_block, key.y_block)).or_insert(0) += c;
            *next_x_counts.entry((key.next, key.x_block)).or_insert(0) += c;
            *x_counts.entry(key.x_block).or_insert(0) += c;
        }
        Self {
            counts,
            xy_counts,
            next_x_counts,
            x_counts,
            n_effective: triples.len() as u64,
        }
    }
}

fn block_codes(symbols: &[u8], alphabet: usize, order: usize) -> Result<Vec<u64>, EntropyError> {
    let overflow = EntropyError::BlockOverflow { order, alphabet };
    let alphabet = u64::try_from(alphabet.max(1)).map_err(|_| overflow.clone())?;
    alphabet
        .checked_pow(u32::try_from(order).map_err(|_| overflow.clone())?)
        .ok_or(overflow)?;
    // codes[t] packs symbols[t], symbols[t-1], ... symbols[t-order+1]
    Ok((order - 1..symbols.len())
        .map(|t| {
            (0..order).rev().fold(0u64, |acc, i| acc * alphabet + symbols[t - i] as u64)
        })
        .collect())
}

/// Builds the joint table for `TE(y -> x)`.
pub fn embed(x: &SymbolSeries, y: &SymbolSeries, params: EmbedParams) -> Result<JointTable, EntropyError> {
    let n = x.len();
    if n != y.len() {
        return Err(EntropyError::LengthMismatch(n, y.len()));
    }
    let (k, l) = (params.k, params.l);
    if n < k + l + 1 {
        return Err(EntropyError::TooShort { len: n, k, l });
    }
    let xs = x.symbols();
    let x_blocks = block_codes(xs, x.alphabet_size(), k)?;
    let y_blocks = block_codes(y.symbols(), y.alphabet_size(), l)?;
    let start = k.max(l) - 1;
    let triples = (start..n - 1)
        .map(|t| TripleKey {
            next: xs[t + 1],
            x_block: x_blocks[t + 1 - k],
            y_block: y_blocks[t + 1 - l],
        })
        .collect();
    Ok(JointTable::from_triples(triples))
}

/// Plug-in transfer entropy in bits, clamped at zero.
pub fn transfer_entropy(table: &JointTable) -> Result<f64, EntropyError> {
    if table.is_empty() {
        return Err(EntropyError::EmptyTable);
    }
    let n = table.n_effective as f64;
    let mut te = 0.0;
    for (key, &c) in &table.counts {
        let n_xy = table.xy_counts[&(key.x_block, key.y_block)];
        let n_nx = table.next_x_counts[&(key.next, key.x_block)];
        let n_x = table.x_counts[&key.x_block];
        // p(n|x,y) / p(n|x) = (c / n_xy) / (n_nx / n_x)
        let ratio = (c as f64 * n_x as f64) / (n_xy as f64 * n_nx as f64);
        te += c as f64 / n * ratio.log2();
    }
    debug_assert!(te > -1e-9, "plug-in transfer entropy {te} is negative");
    Ok(te.max(0.0))
}

/// `TE(y -> x)`: bits the history of `y` adds about the next value of `x`.
///
/// Note the argument order: the *destination* comes first. The value
/// describes information flowing from the second argument into the first.
pub fn directed_te(x: &SymbolSeries, y: &SymbolSeries, params: EmbedParams) -> Result<f64, EntropyError> {
    transfer_entropy(&embed(x, y, params)?)
}
