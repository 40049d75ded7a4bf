//! Command-line front end for `teflow`.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use teflow::export::Precision;
use teflow::flow::Scope;
use teflow::ingest::IngestError;

use config::{PartialConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// Core failures are caused by the inputs, except for I/O faults while
    /// reading files that were found.
    pub fn from_core(e: impl Into<teflow::Error>) -> Self {
        match e.into() {
            teflow::Error::Ingest(IngestError::Io(e)) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "teflow", version, about = "Effective transfer entropy between daily price series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptive statistics of daily log returns.
    Stats(Options),
    /// Both directions for every in-scope instrument pair.
    Flow(Options),
    /// A single directed pair.
    Pair {
        #[arg(long)]
        source: String,
        #[arg(long)]
        destination: String,
        #[command(flatten)]
        options: Options,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Price CSV, long (`ticker,date,close`) or wide (`date,<ticker>...`).
    #[arg(long)]
    pub prices: Option<PathBuf>,
    /// Instrument manifest CSV (`ticker,name,currency,market`).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Alphabet size; alone it selects equiprobable quantile bins.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Quantile levels used as bin edges, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "thresholds")]
    pub quantiles: Option<Vec<f64>>,
    /// Fixed return thresholds used as bin edges, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub thresholds: Option<Vec<f64>>,
    /// Destination history length.
    #[arg(long)]
    pub k: Option<usize>,
    /// Source history length.
    #[arg(long)]
    pub l: Option<usize>,
    /// Shuffled surrogates per estimate.
    #[arg(long)]
    pub shuffles: Option<usize>,
    /// Bootstrap replicates per estimate.
    #[arg(long)]
    pub boot: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Significance levels, strictly decreasing, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// `all`, a market (`Europe`) or a market pair (`Canada-Europe`).
    #[arg(long)]
    pub scope: Option<Scope>,
    /// Largest p-value drawn in the dominance graph.
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Decimal places in CSV and DOT output, or `full`.
    #[arg(long)]
    pub precision: Option<Precision>,
    /// Preferred focal instruments for net flow, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub focal: Option<Vec<String>>,
    /// JSON config file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Options {
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => PartialConfig::load(path)?,
            None => PartialConfig::default(),
        };
        let flags = PartialConfig {
            prices: self.prices,
            manifest: self.manifest,
            out: self.out,
            bins: self.bins,
            quantiles: self.quantiles,
            thresholds: self.thresholds,
            k: self.k,
            l: self.l,
            shuffles: self.shuffles,
            boot: self.boot,
            seed: self.seed,
            levels: self.levels,
            scope: self.scope,
            cutoff: self.cutoff,
            precision: self.precision,
            focal: self.focal,
        };
        // A flag picking one edge family drops the other from the file.
        let mut file = file;
        if flags.quantiles.is_some() || flags.thresholds.is_some() || flags.bins.is_some() {
            file.quantiles = None;
            file.thresholds = None;
            file.bins = None;
        }
        RunConfig::resolve(flags.over(file))
    }
}

pub fn run(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(o) => commands::stats(&o.resolve()?, stdout),
        Command::Flow(o) => {
            let summary = commands::flow(&o.resolve()?)?;
            commands::print_flow_summary(&summary, stdout).map_err(|e| CliError::Internal(e.to_string()))
        }
        Command::Pair {
            source,
            destination,
            options,
        } => commands::pair(&options.resolve()?, &source, &destination, stdout),
    }
}
