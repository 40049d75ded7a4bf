//! All-pairs analysis, net flows and the dominance graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::EmbedParams;
use crate::inference::{significance, InferenceParams, TeResult};
use crate::ingest::{align_pair, InstrumentMeta, Market, ReturnSeries};
use crate::symbolize::{symbolize, SymbolScheme};

/// Which unordered instrument pairs to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scope {
    All,
    Within(Market),
    /// Pairs with one instrument in each market. Stored in canonical order.
    Between(Market, Market),
}

impl Scope {
    pub fn between(a: Market, b: Market) -> Self {
        if a == b {
            Scope::Within(a)
        } else {
            Scope::Between(a.min(b), a.max(b))
        }
    }

    pub fn includes(&self, a: Market, b: Market) -> bool {
        match *self {
            Scope::All => true,
            Scope::Within(m) => a == m && b == m,
            Scope::Between(m1, m2) => (a == m1 && b == m2) || (a == m2 && b == m1),
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::All => f.write_str("all"),
            Scope::Within(m) => write!(f, "{m}"),
            Scope::Between(a, b) => write!(f, "{a}-{b}"),
        }
    }
}

impl FromStr for Scope {
    type Err = String;

    /// `all`, a market (`US`, `Canada`, `Europe`) or two markets joined by `-`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Scope::All);
        }
        match s.split_once('-') {
            Some((a, b)) => Ok(Scope::between(a.parse()?, b.parse()?)),
            None => Ok(Scope::Within(s.parse()?)),
        }
    }
}

impl TryFrom<String> for Scope {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Scope> for String {
    fn from(scope: Scope) -> Self {
        scope.to_string()
    }
}

/// A directed pair that could not be computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub source: String,
    pub destination: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowMatrix {
    instruments: Vec<InstrumentMeta>,
    results: BTreeMap<(String, String), TeResult>,
    skipped: Vec<SkipRecord>,
}

impl FlowMatrix {
    pub fn new(instruments: Vec<InstrumentMeta>, results: Vec<TeResult>, mut skipped: Vec<SkipRecord>) -> Self {
        let results = results
            .into_iter()
            .map(|r| ((r.source.clone(), r.destination.clone()), r))
            .collect();
        skipped.sort_by(|a, b| (&a.source, &a.destination).cmp(&(&b.source, &b.destination)));
        Self {
            instruments,
            results,
            skipped,
        }
    }

    pub fn instruments(&self) -> &[InstrumentMeta] {
        &self.instruments
    }

    pub fn get(&self, source: &str, destination: &str) -> Option<&TeResult> {
        self.results.get(&(source.to_string(), destination.to_string()))
    }

    /// Results ordered by source, then destination.
    pub fn results(&self) -> impl Iterator<Item = &TeResult> {
        self.results.values()
    }

    pub fn skipped(&self) -> &[SkipRecord] {
        &self.skipped
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }
}

/// `source -> destination` on the pair's common dates. Each series is
/// symbolized on the aligned sample, so the result is the same cell that
/// [`pairwise_analysis`] produces.
pub fn directed_pair(
    source: &ReturnSeries,
    destination: &ReturnSeries,
    scheme: &SymbolScheme,
    embed: EmbedParams,
    inf: &InferenceParams,
) -> crate::Result<TeResult> {
    let (src, dst) = align_pair(source, destination)?;
    let y = symbolize(&src, scheme)?;
    let x = symbolize(&dst, scheme)?;
    Ok(significance(&x, &y, embed, inf)?)
}

fn both_directions(
    a: &ReturnSeries,
    b: &ReturnSeries,
    scheme: &SymbolScheme,
    embed: EmbedParams,
    inf: &InferenceParams,
) -> crate::Result<[TeResult; 2]> {
    let (ra, rb) = align_pair(a, b)?;
    let sa = symbolize(&ra, scheme)?;
    let sb = symbolize(&rb, scheme)?;
    Ok([significance(&sb, &sa, embed, inf)?, significance(&sa, &sb, embed, inf)?])
}

/// Unordered pairs `(i, j)`, `i < j`, admitted by `scope`.
pub fn scoped_pairs(instruments: &[InstrumentMeta], scope: Scope) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..instruments.len() {
        for j in i + 1..instruments.len() {
            if scope.includes(instruments[i].market, instruments[j].market) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Both directions for every in-scope pair. Pairs that fail (no common dates,
/// degenerate quantiles, too short) become skip records.
pub fn pairwise_analysis(
    series: &[ReturnSeries],
    scheme: &SymbolScheme,
    embed: EmbedParams,
    inf: &InferenceParams,
    scope: Scope,
) -> FlowMatrix {
    let instruments: Vec<InstrumentMeta> = series.iter().map(|s| s.meta().clone()).collect();
    let outcomes: Vec<_> = scoped_pairs(&instruments, scope)
        .into_par_iter()
        .map(|(i, j)| {
            let (a, b) = (&series[i], &series[j]);
            (a.ticker(), b.ticker(), both_directions(a, b, scheme, embed, inf))
        })
        .collect();
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for (a, b, outcome) in outcomes {
        match outcome {
            Ok(pair) => results.extend(pair),
            Err(e) => {
                for (source, destination) in [(a, b), (b, a)] {
                    skipped.push(SkipRecord {
                        source: source.to_string(),
                        destination: destination.to_string(),
                        reason: e.to_string(),
                    });
                }
            }
        }
    }
    FlowMatrix::new(instruments, results, skipped)
}

/// How to choose the focal instrument of a pair for net-flow reporting.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FocalRule {
    /// The lexicographically smaller ticker.
    #[default]
    Lexicographic,
    /// The first listed ticker present in the pair, else lexicographic.
    Preferred(Vec<String>),
}

impl FocalRule {
    pub fn focal<'a>(&self, a: &'a str, b: &'a str) -> (&'a str, &'a str) {
        if let FocalRule::Preferred(list) = self {
            for t in list {
                if t == a {
                    return (a, b);
                }
                if t == b {
                    return (b, a);
                }
            }
        }
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Sign convention: `difference = ETE(other -> focal) - ETE(focal -> other)`,
/// so a positive value means the focal instrument receives more than it sends.
pub const NET_FLOW_CONVENTION: &str =
    "difference = ETE(other->focal) - ETE(focal->other); positive means the focal instrument is a net receiver";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetFlow {
    pub focal: String,
    pub other: String,
    pub difference: f64,
}

impl NetFlow {
    /// Canonical pair label, tickers in lexicographic order.
    pub fn pair(&self) -> String {
        let (a, b) = if self.focal <= self.other {
            (&self.focal, &self.other)
        } else {
            (&self.other, &self.focal)
        };
        format!("{a}/{b}")
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct NetFlowReport {
    pub flows: Vec<NetFlow>,
    /// Pairs with a missing direction, as `focal/other`.
    pub excluded: Vec<String>,
}

/// Net flow of one pair with an explicit focal instrument.
pub fn pair_net_flow(matrix: &FlowMatrix, focal: &str, other: &str) -> Option<NetFlow> {
    let inbound = matrix.get(other, focal)?;
    let outbound = matrix.get(focal, other)?;
    Some(NetFlow {
        focal: focal.to_string(),
        other: other.to_string(),
        difference: inbound.ete - outbound.ete,
    })
}

/// Net flows for every pair that appears in the matrix or its skip list.
pub fn net_flow(matrix: &FlowMatrix, rule: &FocalRule) -> NetFlowReport {
    let keys = matrix
        .results
        .keys()
        .map(|(s, d)| (s.as_str(), d.as_str()))
        .chain(matrix.skipped.iter().map(|r| (r.source.as_str(), r.destination.as_str())));
    let pairs: BTreeSet<(&str, &str)> = keys.map(|(s, d)| if s <= d { (s, d) } else { (d, s) }).collect();
    let mut report = NetFlowReport::default();
    for (a, b) in pairs {
        let (focal, other) = rule.focal(a, b);
        match pair_net_flow(matrix, focal, other) {
            Some(flow) => report.flows.push(flow),
            None => report.excluded.push(format!("{focal}/{other}")),
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowNode {
    #[serde(flatten)]
    pub meta: InstrumentMeta,
    /// Sum of ETE over significant outgoing edges.
    pub out_ete: f64,
    /// Sum of ETE over significant incoming edges.
    pub in_ete: f64,
}

impl FlowNode {
    /// Sends more than it receives over significant edges.
    pub fn net_sender(&self) -> bool {
        self.out_ete > self.in_ete
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowEdge {
    pub source: String,
    pub destination: String,
    pub ete: f64,
    pub p_value: f64,
}

/// Significant directed flows. Nodes are grouped by market.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowGraph {
    pub cutoff: f64,
    pub nodes: Vec<FlowNode>,
    pub edges: Vec<FlowEdge>,
}

/// Keeps exactly the results with `p_value <= cutoff`.
pub fn dominance_graph(matrix: &FlowMatrix, cutoff: f64) -> FlowGraph {
    let edges: Vec<FlowEdge> = matrix
        .results()
        .filter(|r| r.p_value <= cutoff)
        .map(|r| FlowEdge {
            source: r.source.clone(),
            destination: r.destination.clone(),
            ete: r.ete,
            p_value: r.p_value,
        })
        .collect();
    let mut nodes: Vec<FlowNode> = matrix
        .instruments
        .iter()
        .map(|meta| FlowNode {
            meta: meta.clone(),
            out_ete: edges.iter().filter(|e| e.source == meta.ticker).map(|e| e.ete).sum(),
            in_ete: edges.iter().filter(|e| e.destination == meta.ticker).map(|e| e.ete).sum(),
        })
        .collect();
    // stable: manifest order within each market
    nodes.sort_by_key(|n| n.meta.market);
    FlowGraph { cutoff, nodes, edges }
}
