//! Bias correction and significance for directed transfer entropy.
//!
//! * Effective transfer entropy subtracts the mean TE obtained against `M`
//!   shuffled copies of the source. Shuffling keeps the source's symbol
//!   frequencies and destroys its timing relative to the destination.
//! * Significance resamples the source `B` times from its own fitted Markov
//!   chain of order `l` (destination held fixed). The replicates share the
//!   source's serial structure but carry no information about the destination,
//!   so they sample TE under the null of no flow. The p-value is the share of
//!   replicates reaching the observed TE; the standard error is their sample
//!   standard deviation.
//!
//! Random draws come from [`crate::rng::substream`] keyed by the directed pair
//! `(source ticker, destination ticker)`, so results do not depend on thread
//! scheduling.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::{directed_te, EmbedParams, EntropyError};
use crate::rng::{substream, PairKey, Purpose};
use crate::symbolize::SymbolSeries;

#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("significance levels must be 1 to 4 values strictly decreasing in (0, 1): {0:?}")]
    InvalidLevels(Vec<f64>),
    #[error("series of length {len} is too short for a Markov chain of order {order}")]
    TooShort { len: usize, order: usize },
    #[error("Markov order {order} over an alphabet of {alphabet} is too large")]
    OrderTooLarge { order: usize, alphabet: usize },
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

/// Significance thresholds, strictly decreasing, e.g. `0.1, 0.05, 0.01, 0.001`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SignificanceLevels(Vec<f64>);

impl SignificanceLevels {
    pub fn new(levels: Vec<f64>) -> Result<Self, InferenceError> {
        let in_range = levels.iter().all(|&p| p > 0.0 && p < 1.0);
        let decreasing = levels.windows(2).all(|w| w[0] > w[1]);
        if levels.is_empty() || levels.len() > 4 || !in_range || !decreasing {
            return Err(InferenceError::InvalidLevels(levels));
        }
        Ok(Self(levels))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Mark for a p-value. With fewer than four levels the marks are taken
    /// from the severe end, so `0.05, 0.01, 0.001` yields `*`, `**`, `***`.
    pub fn mark(&self, p_value: f64) -> Mark {
        let met = self.0.iter().filter(|&&level| p_value <= level).count();
        if met == 0 {
            return Mark::None;
        }
        Mark::from_severity(4 - self.0.len() + met)
    }
}

impl Default for SignificanceLevels {
    fn default() -> Self {
        Self(vec![0.1, 0.05, 0.01, 0.001])
    }
}

impl TryFrom<Vec<f64>> for SignificanceLevels {
    type Error = InferenceError;

    fn try_from(levels: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(levels)
    }
}

impl From<SignificanceLevels> for Vec<f64> {
    fn from(levels: SignificanceLevels) -> Self {
        levels.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    None,
    Dot,
    Star,
    Star2,
    Star3,
}

impl Mark {
    fn from_severity(severity: usize) -> Self {
        match severity {
            0 => Mark::None,
            1 => Mark::Dot,
            2 => Mark::Star,
            3 => Mark::Star2,
            _ => Mark::Star3,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Mark::None => "",
            Mark::Dot => ".",
            Mark::Star => "*",
            Mark::Star2 => "**",
            Mark::Star3 => "***",
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Mark {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "" | "none" => Ok(Mark::None),
            "." | "dot" => Ok(Mark::Dot),
            "*" | "star" => Ok(Mark::Star),
            "**" | "star2" => Ok(Mark::Star2),
            "***" | "star3" => Ok(Mark::Star3),
            other => Err(format!("unknown mark {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceParams {
    pub shuffles: usize,
    pub bootstraps: usize,
    pub seed: u64,
    pub levels: SignificanceLevels,
}

impl InferenceParams {
    pub fn new(shuffles: usize, bootstraps: usize, seed: u64, levels: SignificanceLevels) -> Result<Self, InferenceError> {
        let params = Self {
            shuffles,
            bootstraps,
            seed,
            levels,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), InferenceError> {
        if self.shuffles == 0 {
            return Err(InferenceError::ZeroCount("shuffles"));
        }
        if self.bootstraps == 0 {
            return Err(InferenceError::ZeroCount("bootstraps"));
        }
        Ok(())
    }
}

impl Default for InferenceParams {
    fn default() -> Self {
        Self {
            shuffles: 100,
            bootstraps: 300,
            seed: 0,
            levels: SignificanceLevels::default(),
        }
    }
}

/// One directed measurement `source -> destination`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeResult {
    pub source: String,
    pub destination: String,
    pub te: f64,
    pub ete: f64,
    pub std_err: f64,
    pub p_value: f64,
    pub mark: Mark,
    pub n_effective: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTe {
    pub te: f64,
    /// `te` minus the surrogate mean, clamped at zero.
    pub ete: f64,
    pub surrogate_mean: f64,
}

/// Uniform random permutation of the series.
pub fn shuffle_surrogate<R: Rng + ?Sized>(y: &SymbolSeries, rng: &mut R) -> SymbolSeries {
    let mut symbols = y.symbols().to_vec();
    symbols.shuffle(rng);
    y.with_symbols(symbols)
}

/// Empirical Markov chain of a fixed order over a symbol series.
#[derive(Debug, Clone)]
pub struct MarkovChain {
    order: usize,
    alphabet: u64,
    /// `alphabet^(order - 1)`, for rolling the context forward.
    shift: u64,
    /// Successor counts per context (packed most recent symbol first).
    transitions: HashMap<u64, Vec<u64>>,
    marginal: Vec<u64>,
    source: Vec<u8>,
}

impl MarkovChain {
    pub fn fit(y: &SymbolSeries, order: usize) -> Result<Self, InferenceError> {
        let n = y.len();
        if order == 0 || n <= order {
            return Err(InferenceError::TooShort { len: n, order });
        }
        let alphabet = y.alphabet_size() as u64;
        let too_large = InferenceError::OrderTooLarge {
            order,
            alphabet: y.alphabet_size(),
        };
        let shift = u32::try_from(order - 1)
            .ok()
            .and_then(|e| alphabet.checked_pow(e))
            .filter(|s| s.checked_mul(alphabet).is_some())
            .ok_or(too_large)?;
        let symbols = y.symbols();
        let mut transitions: HashMap<u64, Vec<u64>> = HashMap::new();
        let mut context = pack(&symbols[..order], alphabet);
        for &next in &symbols[order..n] {
            transitions.entry(context).or_insert_with(|| vec![0; alphabet as usize])[next as usize] += 1;
            context = (context % shift) * alphabet + next as u64;
        }
        let mut marginal = vec![0; alphabet as usize];
        for &s in symbols {
            marginal[s as usize] += 1;
        }
        Ok(Self {
            order,
            alphabet,
            shift,
            transitions,
            marginal,
            source: symbols.to_vec(),
        })
    }

    /// Fresh path of `len` symbols. The first `order` symbols are an observed
    /// block drawn uniformly from the source's positions; each later symbol is
    /// drawn from the successor counts of the current context, falling back to
    /// the symbol marginal for a context never followed by anything.
    pub fn sample<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        let start = rng.random_range(0..=self.source.len() - self.order);
        out.extend(self.source[start..start + self.order].iter().take(len));
        let mut context = pack(&out, self.alphabet);
        while out.len() < len {
            let weights = self.transitions.get(&context).unwrap_or(&self.marginal);
            let next = draw(weights, rng);
            out.push(next);
            context = (context % self.shift) * self.alphabet + next as u64;
        }
        out
    }
}

fn pack(block: &[u8], alphabet: u64) -> u64 {
    // oldest symbol in the highest digit
    block.iter().fold(0, |acc, &s| acc * alphabet + s as u64)
}

fn draw<R: Rng + ?Sized>(weights: &[u64], rng: &mut R) -> u8 {
    let total: u64 = weights.iter().sum();
    let mut r = rng.random_range(0..total);
    for (symbol, &w) in weights.iter().enumerate() {
        if r < w {
            return symbol as u8;
        }
        r -= w;
    }
    unreachable!("draw exceeded total weight")
}

/// Resamples `y` from its own order-`order` Markov chain.
pub fn markov_block_bootstrap<R: Rng + ?Sized>(
    y: &SymbolSeries,
    order: usize,
    rng: &mut R,
) -> Result<SymbolSeries, InferenceError> {
    let chain = MarkovChain::fit(y, order)?;
    Ok(y.with_symbols(chain.sample(y.len(), rng)))
}

fn pair_key(x: &SymbolSeries, y: &SymbolSeries) -> PairKey {
    PairKey::for_pair(y.ticker(), x.ticker())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn surrogate_tes(
    x: &SymbolSeries,
    y: &SymbolSeries,
    embed: EmbedParams,
    inf: &InferenceParams,
) -> Result<Vec<f64>, InferenceError> {
    let key = pair_key(x, y);
    (0..inf.shuffles)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(inf.seed, key, Purpose::Shuffle, i as u64);
            Ok(directed_te(x, &shuffle_surrogate(y, &mut rng), embed)?)
        })
        .collect()
}

/// `TE(y -> x)` and its shuffle-corrected counterpart.
pub fn effective_te(
    x: &SymbolSeries,
    y: &SymbolSeries,
    embed: EmbedParams,
    inf: &InferenceParams,
) -> Result<EffectiveTe, InferenceError> {
    inf.validate()?;
    let te = directed_te(x, y, embed)?;
    let surrogate_mean = mean(&surrogate_tes(x, y, embed, inf)?);
    Ok(EffectiveTe {
        te,
        ete: (te - surrogate_mean).max(0.0),
        surrogate_mean,
    })
}

/// Null distribution of `TE(y -> x)` under Markov resampling of `y`.
pub fn bootstrap_tes(
    x: &SymbolSeries,
    y: &SymbolSeries,
    embed: EmbedParams,
    inf: &InferenceParams,
) -> Result<Vec<f64>, InferenceError> {
    let chain = MarkovChain::fit(y, embed.l())?;
    let key = pair_key(x, y);
    (0..inf.bootstraps)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(inf.seed, key, Purpose::Bootstrap, b as u64);
            let resample = y.with_symbols(chain.sample(y.len(), &mut rng));
            Ok(directed_te(x, &resample, embed)?)
        })
        .collect()
}

/// Full directed result for `y -> x`.
pub fn significance(
    x: &SymbolSeries,
    y: &SymbolSeries,
    embed: EmbedParams,
    inf: &InferenceParams,
) -> Result<TeResult, InferenceError> {
    let eff = effective_te(x, y, embed, inf)?;
    let replicates = bootstrap_tes(x, y, embed, inf)?;
    let b = replicates.len();
    let exceed = replicates.iter().filter(|&&r| r >= eff.te).count();
    let p_value = exceed as f64 / b as f64;
    let std_err = if b > 1 {
        let m = mean(&replicates);
        (replicates.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (b - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(TeResult {
        source: y.ticker().to_string(),
        destination: x.ticker().to_string(),
        te: eff.te,
        ete: eff.ete,
        std_err,
        p_value,
        mark: inf.levels.mark(p_value),
        n_effective: embed.n_effective(x.len()),
    })
}
