//! Run configuration: defaults, config-file keys and flag overrides.
//!
//! Precedence is flags, then config file, then defaults. The fully resolved
//! [`RunConfig`] is written next to the outputs and can be passed back through
//! `--config` to replay a run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use teflow::entropy::EmbedParams;
use teflow::export::Precision;
use teflow::flow::{FocalRule, Scope};
use teflow::inference::{InferenceParams, SignificanceLevels};
use teflow::symbolize::{SchemeKind, SymbolScheme};

use crate::CliError;

pub const DEFAULT_QUANTILES: [f64; 2] = [0.05, 0.95];
pub const DEFAULT_CUTOFF: f64 = 0.05;

/// Every key optional; used for config files and command-line flags alike.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialConfig {
    pub prices: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub bins: Option<usize>,
    pub quantiles: Option<Vec<f64>>,
    pub thresholds: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub shuffles: Option<usize>,
    pub boot: Option<usize>,
    pub seed: Option<u64>,
    pub levels: Option<Vec<f64>>,
    pub scope: Option<Scope>,
    pub cutoff: Option<f64>,
    pub precision: Option<Precision>,
    pub focal: Option<Vec<String>>,
}

impl PartialConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("invalid config {}: {e}", path.display())))
    }

    /// Keys set in `self` win over `base`.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            prices: self.prices.or(base.prices),
            manifest: self.manifest.or(base.manifest),
            out: self.out.or(base.out),
            bins: self.bins.or(base.bins),
            quantiles: self.quantiles.or(base.quantiles),
            thresholds: self.thresholds.or(base.thresholds),
            k: self.k.or(base.k),
            l: self.l.or(base.l),
            shuffles: self.shuffles.or(base.shuffles),
            boot: self.boot.or(base.boot),
            seed: self.seed.or(base.seed),
            levels: self.levels.or(base.levels),
            scope: self.scope.or(base.scope),
            cutoff: self.cutoff.or(base.cutoff),
            precision: self.precision.or(base.precision),
            focal: self.focal.or(base.focal),
        }
    }
}

/// Fully resolved, replayable configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub prices: PathBuf,
    pub manifest: PathBuf,
    pub out: Option<PathBuf>,
    pub bins: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantiles: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    pub k: usize,
    pub l: usize,
    pub shuffles: usize,
    pub boot: usize,
    pub seed: u64,
    pub levels: Vec<f64>,
    pub scope: Scope,
    pub cutoff: f64,
    pub precision: Precision,
    pub focal: Vec<String>,
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

impl RunConfig {
    pub fn resolve(p: PartialConfig) -> Result<Self, CliError> {
        let prices = p.prices.ok_or_else(|| input("missing --prices"))?;
        let manifest = p.manifest.ok_or_else(|| input("missing --manifest"))?;

        let scheme = match (p.quantiles, p.thresholds) {
            (Some(_), Some(_)) => return Err(input("--quantiles and --thresholds are mutually exclusive")),
            (Some(q), None) => SymbolScheme::quantile(q).map_err(input)?,
            (None, Some(t)) => SymbolScheme::thresholds(t).map_err(input)?,
            (None, None) => match p.bins {
                Some(bins) => SymbolScheme::equiprobable(bins).map_err(input)?,
                None => SymbolScheme::quantile(DEFAULT_QUANTILES.to_vec()).map_err(input)?,
            },
        };
        if let Some(bins) = p.bins {
            if bins != scheme.alphabet_size() {
                return Err(CliError::Input(format!(
                    "--bins {bins} disagrees with {} bin edges",
                    scheme.bin_edges().len()
                )));
            }
        }
        let edges = Some(scheme.bin_edges().to_vec());
        let (quantiles, thresholds) = match scheme.kind() {
            SchemeKind::Quantile => (edges, None),
            SchemeKind::FixedThresholds => (None, edges),
        };

        let defaults = InferenceParams::default();
        let cutoff = p.cutoff.unwrap_or(DEFAULT_CUTOFF);
        if !(0.0..=1.0).contains(&cutoff) {
            return Err(CliError::Input(format!("--cutoff {cutoff} is outside [0, 1]")));
        }
        let config = RunConfig {
            prices,
            manifest,
            out: p.out,
            bins: scheme.alphabet_size(),
            quantiles,
            thresholds,
            k: p.k.unwrap_or(1),
            l: p.l.unwrap_or(1),
            shuffles: p.shuffles.unwrap_or(defaults.shuffles),
            boot: p.boot.unwrap_or(defaults.bootstraps),
            seed: p.seed.unwrap_or(defaults.seed),
            levels: p.levels.unwrap_or_else(|| defaults.levels.as_slice().to_vec()),
            scope: p.scope.unwrap_or(Scope::All),
            cutoff,
            precision: p.precision.unwrap_or_default(),
            focal: p.focal.unwrap_or_default(),
        };
        config.embed()?;
        config.inference()?;
        Ok(config)
    }

    pub fn scheme(&self) -> SymbolScheme {
        match (&self.quantiles, &self.thresholds) {
            (Some(q), _) => SymbolScheme::quantile(q.clone()),
            (_, Some(t)) => SymbolScheme::thresholds(t.clone()),
            _ => SymbolScheme::equiprobable(self.bins),
        }
        .expect("validated during resolution")
    }

    pub fn embed(&self) -> Result<EmbedParams, CliError> {
        EmbedParams::new(self.k, self.l).map_err(input)
    }

    pub fn inference(&self) -> Result<InferenceParams, CliError> {
        let levels = SignificanceLevels::new(self.levels.clone()).map_err(input)?;
        InferenceParams::new(self.shuffles, self.boot, self.seed, levels).map_err(input)
    }

    pub fn focal_rule(&self) -> FocalRule {
        if self.focal.is_empty() {
            FocalRule::Lexicographic
        } else {
            FocalRule::Preferred(self.focal.clone())
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
