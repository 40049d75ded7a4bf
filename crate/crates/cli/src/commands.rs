//! The `stats`, `flow` and `pair` subcommands.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use tempfile::NamedTempFile;
use teflow::export::{
    write_dot, write_graph_json, write_matrix_csv, write_net_flow_csv, write_skipped_csv, write_stats_csv,
    Precision,
};
use teflow::flow::{directed_pair, dominance_graph, net_flow, pairwise_analysis, FlowMatrix};
use teflow::ingest::{describe, load_prices, log_returns, write_row_errors, Manifest, ReturnSeries, RowError};

use crate::config::RunConfig;
use crate::CliError;

pub const MATRIX_FILE: &str = "matrix.csv";
pub const NET_FLOW_FILE: &str = "net_flow.csv";
pub const SKIPPED_FILE: &str = "skipped.csv";
pub const ROW_ERRORS_FILE: &str = "row_errors.csv";
pub const STATS_FILE: &str = "stats.csv";
pub const DOT_FILE: &str = "graph.dot";
pub const GRAPH_JSON_FILE: &str = "graph.json";
pub const RESULTS_JSON_FILE: &str = "results.json";
pub const CONFIG_FILE: &str = "run_config.json";

fn internal(context: &str, path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Internal(format!("{context} {}: {e}", path.display()))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic<F>(dir: &Path, name: &str, fill: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let target = dir.join(name);
    let tmp = NamedTempFile::new_in(dir).map_err(|e| internal("cannot create temporary file in", dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w).map_err(|e| internal("cannot write", &target, e))?;
        w.flush().map_err(|e| internal("cannot write", &target, e))?;
    }
    tmp.persist(&target).map_err(|e| internal("cannot persist", &target, e))?;
    Ok(target)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| internal("cannot create output directory", dir, e))
}

/// Loaded inputs: manifest-ordered return series plus skipped rows.
pub struct Inputs {
    pub manifest: Manifest,
    pub returns: Vec<ReturnSeries>,
    pub row_errors: Vec<RowError>,
}

/// Loads the manifest and prices. Series with fewer than two closes become
/// empty return series, so their pairs are skipped rather than aborting.
pub fn load_inputs(config: &RunConfig) -> Result<Inputs, CliError> {
    let manifest = Manifest::load(&config.manifest).map_err(CliError::from_core)?;
    let report = load_prices(&config.prices, &manifest).map_err(CliError::from_core)?;
    let returns = report
        .series
        .iter()
        .map(|p| {
            log_returns(p).unwrap_or_else(|_| ReturnSeries::new(p.meta().clone(), Vec::new(), Vec::new()))
        })
        .collect();
    Ok(Inputs {
        manifest,
        returns,
        row_errors: report.row_errors,
    })
}

fn warn_rows(errors: &[RowError]) {
    if !errors.is_empty() {
        eprintln!("warning: skipped {} malformed input row(s)", errors.len());
    }
}

/// Writes descriptive statistics to `<out>/stats.csv`, or to `stdout` when no
/// output directory is configured. Values are written at full precision.
pub fn stats(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let inputs = load_inputs(config)?;
    warn_rows(&inputs.row_errors);
    let mut rows = Vec::with_capacity(inputs.returns.len());
    for r in &inputs.returns {
        let s = describe(r).map_err(CliError::from_core)?;
        rows.push((r.ticker().to_string(), s));
    }
    match &config.out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_atomic(dir, STATS_FILE, |w| write_stats_csv(w, &rows, Precision::Full))?;
            write_atomic(dir, ROW_ERRORS_FILE, |w| {
                write_row_errors(w, &inputs.row_errors).map_err(io::Error::other)
            })?;
            writeln!(stdout, "wrote {} instrument(s) to {}", rows.len(), dir.join(STATS_FILE).display())
                .map_err(|e| CliError::Internal(e.to_string()))
        }
        None => write_stats_csv(stdout, &rows, Precision::Full).map_err(|e| CliError::Internal(e.to_string())),
    }
}

#[derive(Debug)]
pub struct FlowSummary {
    pub matrix: FlowMatrix,
    pub elapsed: Duration,
    pub out: Option<PathBuf>,
}

/// Runs every in-scope pair and writes all artefacts when an output directory
/// is configured.
pub fn flow(config: &RunConfig) -> Result<FlowSummary, CliError> {
    let started = Instant::now();
    let inputs = load_inputs(config)?;
    warn_rows(&inputs.row_errors);
    let matrix = pairwise_analysis(
        &inputs.returns,
        &config.scheme(),
        config.embed()?,
        &config.inference()?,
        config.scope,
    );
    if let Some(dir) = &config.out {
        write_flow_outputs(dir, config, &matrix, &inputs.row_errors)?;
    }
    Ok(FlowSummary {
        matrix,
        elapsed: started.elapsed(),
        out: config.out.clone(),
    })
}

fn write_flow_outputs(dir: &Path, config: &RunConfig, matrix: &FlowMatrix, rows: &[RowError]) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let p = config.precision;
    let report = net_flow(matrix, &config.focal_rule());
    let graph = dominance_graph(matrix, config.cutoff);
    let results: Vec<_> = matrix.results().collect();
    write_atomic(dir, MATRIX_FILE, |w| write_matrix_csv(w, matrix, p))?;
    write_atomic(dir, NET_FLOW_FILE, |w| write_net_flow_csv(w, &report, p))?;
    write_atomic(dir, SKIPPED_FILE, |w| write_skipped_csv(w, matrix))?;
    write_atomic(dir, ROW_ERRORS_FILE, |w| write_row_errors(w, rows).map_err(io::Error::other))?;
    write_atomic(dir, DOT_FILE, |w| write_dot(w, &graph, p))?;
    write_atomic(dir, GRAPH_JSON_FILE, |w| write_graph_json(w, &graph))?;
    write_atomic(dir, RESULTS_JSON_FILE, |w| {
        serde_json::to_writer_pretty(&mut *w, &results).map_err(io::Error::other)?;
        writeln!(w)
    })?;
    write_atomic(dir, CONFIG_FILE, |w| w.write_all(config.to_json().as_bytes()))?;
    Ok(())
}

pub fn print_flow_summary(summary: &FlowSummary, stdout: &mut dyn Write) -> io::Result<()> {
    let m = &summary.matrix;
    writeln!(
        stdout,
        "{} directed pair(s) computed, {} skipped, {} instrument(s), {:.2}s",
        m.len(),
        m.skipped().len(),
        m.instruments().len(),
        summary.elapsed.as_secs_f64()
    )?;
    if let Some(dir) = &summary.out {
        writeln!(stdout, "outputs written to {}", dir.display())?;
    }
    Ok(())
}

/// One directed cell: prints a matrix-format CSV row and a one-line summary.
pub fn pair(config: &RunConfig, source: &str, destination: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let inputs = load_inputs(config)?;
    warn_rows(&inputs.row_errors);
    let find = |ticker: &str| {
        inputs
            .returns
            .iter()
            .find(|r| r.ticker() == ticker)
            .ok_or_else(|| CliError::Input(format!("unknown ticker `{ticker}`")))
    };
    let (src, dst) = (find(source)?, find(destination)?);
    if source == destination {
        return Err(CliError::Input("source and destination must differ".into()));
    }
    let result = directed_pair(src, dst, &config.scheme(), config.embed()?, &config.inference()?)
        .map_err(CliError::from_core)?;
    let matrix = FlowMatrix::new(vec![src.meta().clone(), dst.meta().clone()], vec![result.clone()], Vec::new());
    let io_err = |e: io::Error| CliError::Internal(e.to_string());
    write_matrix_csv(&mut *stdout, &matrix, config.precision).map_err(io_err)?;
    writeln!(
        stdout,
        "# {source} -> {destination}: ETE {} bits, p = {}{}",
        config.precision.format(result.ete),
        config.precision.format(result.p_value),
        match result.mark.symbol() {
            "" => String::new(),
            m => format!(" ({m})"),
        }
    )
    .map_err(io_err)
}
