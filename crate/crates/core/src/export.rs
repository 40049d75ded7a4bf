//! Text exports: CSV tables, Graphviz DOT and JSON.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::flow::{FlowGraph, FlowMatrix, NetFlowReport, NET_FLOW_CONVENTION};
use crate::ingest::{DescriptiveStats, Market};

/// Decimal places for reals in CSV/DOT output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Precision {
    Digits(usize),
    /// Shortest representation that round-trips.
    Full,
}

impl Precision {
    pub fn format(self, value: f64) -> String {
        match self {
            Precision::Digits(d) => format!("{value:.d$}"),
            Precision::Full => format!("{value}"),
        }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Digits(4)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Digits(d) => write!(f, "{d}"),
            Precision::Full => f.write_str("full"),
        }
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(Precision::Full);
        }
        s.parse()
            .map(Precision::Digits)
            .map_err(|_| format!("precision must be a digit count or `full`, got {s:?}"))
    }
}

impl TryFrom<String> for Precision {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Precision> for String {
    fn from(p: Precision) -> Self {
        p.to_string()
    }
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// `source,destination,te,ete,std_err,p_value,mark,n_effective`, canonical order.
pub fn write_matrix_csv<W: Write>(writer: W, matrix: &FlowMatrix, precision: Precision) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["source", "destination", "te", "ete", "std_err", "p_value", "mark", "n_effective"])
        .map_err(csv_err)?;
    for r in matrix.results() {
        w.write_record([
            r.source.clone(),
            r.destination.clone(),
            precision.format(r.te),
            precision.format(r.ete),
            precision.format(r.std_err),
            precision.format(r.p_value),
            r.mark.symbol().to_string(),
            r.n_effective.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

/// `source,destination,reason` for pairs that could not be computed.
pub fn write_skipped_csv<W: Write>(writer: W, matrix: &FlowMatrix) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["source", "destination", "reason"]).map_err(csv_err)?;
    for s in matrix.skipped() {
        w.serialize(s).map_err(csv_err)?;
    }
    w.flush()
}

/// `pair,focal,difference`, preceded by a `#` line stating the sign convention.
pub fn write_net_flow_csv<W: Write>(mut writer: W, report: &NetFlowReport, precision: Precision) -> io::Result<()> {
    writeln!(writer, "# {NET_FLOW_CONVENTION}")?;
    for pair in &report.excluded {
        writeln!(writer, "# excluded {pair}: a direction is missing")?;
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["pair", "focal", "difference"]).map_err(csv_err)?;
    for f in &report.flows {
        w.write_record([f.pair(), f.focal.clone(), precision.format(f.difference)])
            .map_err(csv_err)?;
    }
    w.flush()
}

/// `ticker,mean,std_dev,kurtosis,skewness,n`; undefined moments are written as `NaN`.
pub fn write_stats_csv<W: Write>(
    writer: W,
    rows: &[(String, DescriptiveStats)],
    precision: Precision,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["ticker", "mean", "std_dev", "kurtosis", "skewness", "n"])
        .map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), |v| precision.format(v));
    for (ticker, s) in rows {
        w.write_record([
            ticker.clone(),
            precision.format(s.mean),
            precision.format(s.std_dev),
            opt(s.kurtosis),
            opt(s.skewness),
            s.n.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Largest edge width in points.
const MAX_PENWIDTH: f64 = 8.0;

/// Graphviz digraph: one cluster per market, edges labelled with ETE and
/// drawn with width proportional to ETE.
pub fn write_dot<W: Write>(mut w: W, graph: &FlowGraph, precision: Precision) -> io::Result<()> {
    writeln!(w, "digraph information_flow {{")?;
    writeln!(w, "  rankdir=LR;")?;
    writeln!(w, "  label={};", quote(&format!("significant flows, p <= {}", graph.cutoff)))?;
    writeln!(w, "  node [shape=box, style=rounded];")?;
    for market in Market::ALL {
        let nodes: Vec<_> = graph.nodes.iter().filter(|n| n.meta.market == market).collect();
        if nodes.is_empty() {
            continue;
        }
        writeln!(w, "  subgraph cluster_{} {{", market.as_str().to_ascii_lowercase())?;
        writeln!(w, "    label={};", quote(market.as_str()))?;
        for n in nodes {
            let label = format!(
                "{}\\nout {} / in {}",
                n.meta.ticker,
                precision.format(n.out_ete),
                precision.format(n.in_ete)
            );
            writeln!(
                w,
                "    {} [label=\"{}\"{}];",
                quote(&n.meta.ticker),
                label.replace('"', "\\\""),
                if n.net_sender() { ", penwidth=2" } else { "" }
            )?;
        }
        writeln!(w, "  }}")?;
    }
    let max_ete = graph.edges.iter().map(|e| e.ete).fold(0.0, f64::max);
    for e in &graph.edges {
        let width = if max_ete > 0.0 { MAX_PENWIDTH * e.ete / max_ete } else { 1.0 };
        writeln!(
            w,
            "  {} -> {} [label={}, penwidth={:.3}{}];",
            quote(&e.source),
            quote(&e.destination),
            quote(&precision.format(e.ete)),
            width,
            if e.ete == 0.0 { ", style=dashed" } else { "" }
        )?;
    }
    writeln!(w, "}}")
}

pub fn write_graph_json<W: Write>(writer: W, graph: &FlowGraph) -> io::Result<()> {
    let mut writer = writer;
    serde_json::to_writer_pretty(&mut writer, graph).map_err(io::Error::other)?;
    writeln!(writer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{dominance_graph, net_flow, FocalRule};
    use crate::inference::{Mark, TeResult};
    use crate::ingest::InstrumentMeta;

    fn matrix() -> FlowMatrix {
        let r = |s: &str, d: &str, ete: f64, p: f64, mark| TeResult {
            source: s.into(),
            destination: d.into(),
            te: 0.0452,
            ete,
            std_err: 0.008,
            p_value: p,
            mark,
            n_effective: 299,
        };
        FlowMatrix::new(
            vec![
                InstrumentMeta::synthetic("FLMB", Market::US),
                InstrumentMeta::synthetic("HGGB", Market::Canada),
            ],
            vec![
                r("HGGB", "FLMB", 0.0, 0.53, Mark::None),
                r("FLMB", "HGGB", 0.0167, 1.0 / 300.0, Mark::Star2),
            ],
            Vec::new(),
        )
    }

    #[test]
    fn precision_parsing() {
        assert_eq!("6".parse::<Precision>().unwrap(), Precision::Digits(6));
        assert_eq!("FULL".parse::<Precision>().unwrap(), Precision::Full);
        assert!("x".parse::<Precision>().is_err());
        assert_eq!(Precision::Digits(4).format(1.0 / 300.0), "0.0033");
        assert_eq!(Precision::Full.format(0.1), "0.1");
    }

    #[test]
    fn matrix_csv_layout() {
        let mut out = Vec::new();
        write_matrix_csv(&mut out, &matrix(), Precision::default()).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "source,destination,te,ete,std_err,p_value,mark,n_effective");
        assert_eq!(lines[1], "FLMB,HGGB,0.0452,0.0167,0.0080,0.0033,**,299");
        assert_eq!(lines[2], "HGGB,FLMB,0.0452,0.0000,0.0080,0.5300,,299");
    }

    #[test]
    fn net_flow_csv_has_convention_header() {
        let mut out = Vec::new();
        let report = net_flow(&matrix(), &FocalRule::Preferred(vec!["HGGB".into()]));
        write_net_flow_csv(&mut out, &report, Precision::default()).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("# difference = ETE(other->focal)"));
        assert_eq!(lines[1], "pair,focal,difference");
        assert_eq!(lines[2], "FLMB/HGGB,HGGB,0.0167");
    }

    #[test]
    fn dot_clusters_and_edges() {
        let g = dominance_graph(&matrix(), 0.05);
        let mut out = Vec::new();
        write_dot(&mut out, &g, Precision::default()).unwrap();
        let dot = String::from_utf8(out).unwrap();
        assert!(dot.starts_with("digraph information_flow {"));
        assert!(dot.contains("subgraph cluster_us {"));
        assert!(dot.contains("subgraph cluster_canada {"));
        assert!(!dot.contains("cluster_europe"));
        assert!(dot.contains("\"FLMB\" -> \"HGGB\" [label=\"0.0167\", penwidth=8.000];"));
        assert_eq!(dot.matches(" -> ").count(), 1);
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn graph_json_mirrors_graph() {
        let g = dominance_graph(&matrix(), 0.05);
        let mut out = Vec::new();
        write_graph_json(&mut out, &g).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["cutoff"], 0.05);
        assert_eq!(v["edges"][0]["source"], "FLMB");
        assert_eq!(v["edges"][0]["ete"], 0.0167);
        assert_eq!(v["nodes"][0]["ticker"], "FLMB");
        assert_eq!(v["nodes"][0]["market"], "US");
        assert_eq!(v["nodes"][0]["out_ete"], 0.0167);
    }
}
