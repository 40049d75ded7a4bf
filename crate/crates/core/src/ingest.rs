//! Price ingestion, log returns, calendar alignment and descriptive statistics.
//!
//! Two CSV layouts are accepted for closing prices:
//!
//! * long: header `ticker,date,close`, one observation per row;
//! * wide: header `date,<ticker1>,<ticker2>,...`, an empty cell marks a missing
//!   observation.
//!
//! Dates are ISO-8601 (`YYYY-MM-DD`). Rows that cannot be used (bad date, bad or
//! non-positive close) are skipped and collected as [`RowError`]s instead of
//! aborting the load. Duplicate `(ticker, date)` observations are fatal.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unrecognised price file header {0:?}; expected `ticker,date,close` or `date,<tickers...>`")]
    UnknownLayout(Vec<String>),
    #[error("manifest line {line}: {reason}")]
    Manifest { line: u64, reason: String },
    #[error("duplicate ticker {0} in manifest")]
    DuplicateTicker(String),
    #[error("ticker {0} listed in the manifest is absent from the price file")]
    MissingTicker(String),
    #[error("duplicate observation for {ticker} on {date} (line {line})")]
    DuplicateRow {
        ticker: String,
        date: NaiveDate,
        line: u64,
    },
    #[error("{ticker}: dates must be strictly increasing ({date} follows {previous})")]
    Unordered {
        ticker: String,
        previous: NaiveDate,
        date: NaiveDate,
    },
    #[error("{ticker}: close {close} on {date} is not a positive finite price")]
    NonPositive {
        ticker: String,
        date: NaiveDate,
        close: f64,
    },
    #[error("{ticker}: need at least {needed} observations, got {got}")]
    TooShort {
        ticker: String,
        needed: usize,
        got: usize,
    },
    #[error("{0} and {1} share no dates")]
    EmptyIntersection(String, String),
}

/// Market an instrument is listed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Market {
    US,
    Canada,
    Europe,
}

impl Market {
    pub const ALL: [Market; 3] = [Market::US, Market::Canada, Market::Europe];

    pub fn as_str(self) -> &'static str {
        match self {
            Market::US => "US",
            Market::Canada => "Canada",
            Market::Europe => "Europe",
        }
    }
}

impl fmt::Display for Market {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Market {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "us" | "usa" => Ok(Market::US),
            "canada" | "ca" => Ok(Market::Canada),
            "europe" | "eu" => Ok(Market::Europe),
            other => Err(format!("unknown market {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstrumentMeta {
    pub ticker: String,
    pub name: String,
    pub currency: String,
    pub market: Market,
}

impl InstrumentMeta {
    /// Bare metadata for tests and simulations.
    pub fn synthetic(ticker: impl Into<String>, market: Market) -> Self {
        Self {
            ticker: ticker.into(),
            name: String::new(),
            currency: String::new(),
            market,
        }
    }
}

/// Instrument universe, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    instruments: Vec<InstrumentMeta>,
}

impl Manifest {
    pub fn new(instruments: Vec<InstrumentMeta>) -> Result<Self, IngestError> {
        let mut seen = HashSet::new();
        for meta in &instruments {
            if meta.ticker.is_empty() {
                return Err(IngestError::Manifest {
                    line: 0,
                    reason: "empty ticker".into(),
                });
            }
            if !seen.insert(meta.ticker.as_str()) {
                return Err(IngestError::DuplicateTicker(meta.ticker.clone()));
            }
        }
        Ok(Self { instruments })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        Self::from_reader(open(path.as_ref())?)
    }

    /// Parses a `ticker,name,currency,market` CSV.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| IngestError::Manifest {
                    line: 1,
                    reason: format!("missing column `{name}`"),
                })
        };
        let (ti, ni, ci, mi) = (col("ticker")?, col("name")?, col("currency")?, col("market")?);
        let mut instruments = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let field = |i: usize| record.get(i).unwrap_or("").to_string();
            let market = field(mi)
                .parse::<Market>()
                .map_err(|reason| IngestError::Manifest { line, reason })?;
            instruments.push(InstrumentMeta {
                ticker: field(ti),
                name: field(ni),
                currency: field(ci),
                market,
            });
        }
        Self::new(instruments)
    }

    pub fn instruments(&self) -> &[InstrumentMeta] {
        &self.instruments
    }

    pub fn get(&self, ticker: &str) -> Option<&InstrumentMeta> {
        self.instruments.iter().find(|m| m.ticker == ticker)
    }

    pub fn len(&self) -> usize {
        self.instruments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instruments.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub close: f64,
}

/// Dated closes for one instrument: dates strictly increasing, closes positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    meta: InstrumentMeta,
    observations: Vec<PricePoint>,
}

impl PriceSeries {
    pub fn new(meta: InstrumentMeta, observations: Vec<PricePoint>) -> Result<Self, IngestError> {
        for obs in &observations {
            if !(obs.close.is_finite() && obs.close > 0.0) {
                return Err(IngestError::NonPositive {
                    ticker: meta.ticker.clone(),
                    date: obs.date,
                    close: obs.close,
                });
            }
        }
        for w in observations.windows(2) {
            if w[1].date <= w[0].date {
                return Err(IngestError::Unordered {
                    ticker: meta.ticker.clone(),
                    previous: w[0].date,
                    date: w[1].date,
                });
            }
        }
        Ok(Self { meta, observations })
    }

    pub fn meta(&self) -> &InstrumentMeta {
        &self.meta
    }

    pub fn ticker(&self) -> &str {
        &self.meta.ticker
    }

    pub fn observations(&self) -> &[PricePoint] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Dated log returns for one instrument. Dates strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    meta: InstrumentMeta,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    /// Builds a series from parallel date/value vectors.
    ///
    /// # Panics
    ///
    /// If the vectors differ in length or the dates are not strictly increasing.
    pub fn new(meta: InstrumentMeta, dates: Vec<NaiveDate>, values: Vec<f64>) -> Self {
        assert_eq!(dates.len(), values.len(), "dates and values differ in length");
        assert!(
            dates.windows(2).all(|w| w[0] < w[1]),
            "return dates must be strictly increasing"
        );
        Self { meta, dates, values }
    }

    /// Undated series; dates are consecutive days from 2000-01-01.
    pub fn from_values(meta: InstrumentMeta, values: Vec<f64>) -> Self {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let dates = start.iter_days().take(values.len()).collect();
        Self::new(meta, dates, values)
    }

    pub fn meta(&self) -> &InstrumentMeta {
        &self.meta
    }

    pub fn ticker(&self) -> &str {
        &self.meta.ticker
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A skipped input row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    pub line: u64,
    pub ticker: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct LoadReport {
    /// One series per manifest entry, in manifest order.
    pub series: Vec<PriceSeries>,
    pub row_errors: Vec<RowError>,
}

pub fn load_prices(path: impl AsRef<Path>, manifest: &Manifest) -> Result<LoadReport, IngestError> {
    parse_prices(open(path.as_ref())?, manifest)
}

/// Parses a long- or wide-format price CSV, keeping only manifest tickers.
pub fn parse_prices<R: Read>(reader: R, manifest: &Manifest) -> Result<LoadReport, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let wanted: HashSet<&str> = manifest.instruments().iter().map(|m| m.ticker.as_str()).collect();

    let mut collected: HashMap<String, BTreeMap<NaiveDate, f64>> = HashMap::new();
    let mut mentioned: HashSet<String> = HashSet::new();
    let mut row_errors = Vec::new();

    let accept = |collected: &mut HashMap<String, BTreeMap<NaiveDate, f64>>,
                      ticker: &str,
                      date: NaiveDate,
                      close: f64,
                      line: u64|
     -> Result<(), IngestError> {
        let series = collected.entry(ticker.to_string()).or_default();
        if series.insert(date, close).is_some() {
            return Err(IngestError::DuplicateRow {
                ticker: ticker.to_string(),
                date,
                line,
            });
        }
        Ok(())
    };

    let lower: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    let long_cols = (
        lower.iter().position(|h| h == "ticker"),
        lower.iter().position(|h| h == "date"),
        lower.iter().position(|h| h == "close"),
    );

    if let (Some(ti), Some(di), Some(ci)) = long_cols {
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let ticker = record.get(ti).unwrap_or("");
            if !wanted.contains(ticker) {
                continue;
            }
            mentioned.insert(ticker.to_string());
            match parse_observation(record.get(di).unwrap_or(""), record.get(ci).unwrap_or("")) {
                Ok((date, close)) => accept(&mut collected, ticker, date, close, line)?,
                Err(reason) => row_errors.push(RowError {
                    line,
                    ticker: ticker.to_string(),
                    reason,
                }),
            }
        }
    } else if lower.first().map(String::as_str) == Some("date") {
        let columns: Vec<(usize, &str)> = headers
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, h)| wanted.contains(h.as_str()))
            .map(|(i, h)| (i, h.as_str()))
            .collect();
        for (_, ticker) in &columns {
            mentioned.insert(ticker.to_string());
        }
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let raw_date = record.get(0).unwrap_or("");
            let date = match parse_date(raw_date) {
                Ok(d) => d,
                Err(reason) => {
                    row_errors.push(RowError {
                        line,
                        ticker: "*".into(),
                        reason,
                    });
                    continue;
                }
            };
            for &(i, ticker) in &columns {
                let cell = record.get(i).unwrap_or("");
                if cell.is_empty() {
                    continue;
                }
                match parse_close(cell) {
                    Ok(close) => accept(&mut collected, ticker, date, close, line)?,
                    Err(reason) => row_errors.push(RowError {
                        line,
                        ticker: ticker.to_string(),
                        reason: format!("{reason} on {date}"),
                    }),
                }
            }
        }
    } else {
        return Err(IngestError::UnknownLayout(headers));
    }

    let mut series = Vec::with_capacity(manifest.len());
    for meta in manifest.instruments() {
        if !mentioned.contains(&meta.ticker) {
            return Err(IngestError::MissingTicker(meta.ticker.clone()));
        }
        let observations = collected
            .remove(&meta.ticker)
            .unwrap_or_default()
            .into_iter()
            .map(|(date, close)| PricePoint { date, close })
            .collect();
        series.push(PriceSeries::new(meta.clone(), observations)?);
    }
    Ok(LoadReport { series, row_errors })
}

fn parse_date(raw: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|_| format!("unparseable date {raw:?}"))
}

fn parse_close(raw: &str) -> Result<f64, String> {
    let close: f64 = raw.parse().map_err(|_| format!("unparseable close {raw:?}"))?;
    if !(close.is_finite() && close > 0.0) {
        return Err(format!("non-positive close {raw}"));
    }
    Ok(close)
}

fn parse_observation(date: &str, close: &str) -> Result<(NaiveDate, f64), String> {
    Ok((parse_date(date)?, parse_close(close)?))
}

/// Writes the `line,ticker,reason` report.
pub fn write_row_errors<W: Write>(writer: W, errors: &[RowError]) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["line", "ticker", "reason"])?;
    for e in errors {
        wtr.serialize(e)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Natural-log returns `ln(z_t) - ln(z_{t-1})`, dated at `t`.
pub fn log_returns(prices: &PriceSeries) -> Result<ReturnSeries, IngestError> {
    let obs = prices.observations();
    if obs.len() < 2 {
        return Err(IngestError::TooShort {
            ticker: prices.ticker().to_string(),
            needed: 2,
            got: obs.len(),
        });
    }
    let dates = obs[1..].iter().map(|p| p.date).collect();
    let values = obs.windows(2).map(|w| w[1].close.ln() - w[0].close.ln()).collect();
    Ok(ReturnSeries::new(prices.meta().clone(), dates, values))
}

/// Restricts both series to their common dates.
pub fn align_pair(a: &ReturnSeries, b: &ReturnSeries) -> Result<(ReturnSeries, ReturnSeries), IngestError> {
    let (mut i, mut j) = (0, 0);
    let mut dates = Vec::new();
    let (mut va, mut vb) = (Vec::new(), Vec::new());
    while i < a.len() && j < b.len() {
        match a.dates[i].cmp(&b.dates[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dates.push(a.dates[i]);
                va.push(a.values[i]);
                vb.push(b.values[j]);
                i += 1;
                j += 1;
            }
        }
    }
    if dates.is_empty() {
        return Err(IngestError::EmptyIntersection(
            a.ticker().to_string(),
            b.ticker().to_string(),
        ));
    }
    Ok((
        ReturnSeries::new(a.meta.clone(), dates.clone(), va),
        ReturnSeries::new(b.meta.clone(), dates, vb),
    ))
}

/// Sample moments of a return series.
///
/// `skewness` is the adjusted Fisher-Pearson coefficient and `kurtosis` the
/// raw (non-excess) moment ratio `m4 / m2^2`, so a Gaussian sits near 3. Both
/// are `None` for a zero-variance series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DescriptiveStats {
    pub mean: f64,
    pub std_dev: f64,
    pub kurtosis: Option<f64>,
    pub skewness: Option<f64>,
    pub n: usize,
}

pub fn describe(returns: &ReturnSeries) -> Result<DescriptiveStats, IngestError> {
    let x = returns.values();
    let n = x.len();
    if n < 4 {
        return Err(IngestError::TooShort {
            ticker: returns.ticker().to_string(),
            needed: 4,
            got: n,
        });
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let constant = x.iter().all(|&v| v == x[0]);
    let std_dev = if constant { 0.0 } else { (m2 / (nf - 1.0)).sqrt() };
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let (skewness, kurtosis) = if !constant && m2 > 0.0 {
        let g1 = m3 / m2.powf(1.5);
        let adjusted = (nf * (nf - 1.0)).sqrt() / (nf - 2.0) * g1;
        (Some(adjusted), Some(m4 / (m2 * m2)))
    } else {
        (None, None)
    };
    Ok(DescriptiveStats {
        mean,
        std_dev,
        kurtosis,
        skewness,
        n,
    })
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(tickers: &[&str]) -> Manifest {
        Manifest::new(
            tickers
                .iter()
                .map(|t| InstrumentMeta::synthetic(*t, Market::US))
                .collect(),
        )
        .unwrap()
    }

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn prices(closes: &[f64]) -> PriceSeries {
        let start = d("2022-01-03");
        let obs = closes
            .iter()
            .zip(start.iter_days())
            .map(|(&close, date)| PricePoint { date, close })
            .collect();
        PriceSeries::new(InstrumentMeta::synthetic("T", Market::US), obs).unwrap()
    }

    #[test]
    fn long_format_two_tickers() {
        let mut csv = String::from("ticker,date,close\n");
        for t in ["AAA", "BBB"] {
            for day in 3..8 {
                csv.push_str(&format!("{t},2022-01-0{day},{}\n", 10.0 + day as f64));
            }
        }
        let report = parse_prices(csv.as_bytes(), &manifest(&["AAA", "BBB"])).unwrap();
        assert_eq!(report.series.len(), 2);
        assert!(report.series.iter().all(|s| s.len() == 5));
        assert!(report.row_errors.is_empty());
    }

    #[test]
    fn wide_format_with_gaps() {
        let csv = "date,AAA,BBB,CCC\n2022-01-03,1,2,3\n2022-01-04,,2.5,3\n2022-01-05,1.1,2.4,\n";
        let report = parse_prices(csv.as_bytes(), &manifest(&["BBB", "AAA"])).unwrap();
        assert_eq!(report.series[0].ticker(), "BBB");
        assert_eq!(report.series[0].len(), 3);
        assert_eq!(report.series[1].len(), 2);
    }

    #[test]
    fn zero_close_is_row_error() {
        let csv = "ticker,date,close\nAAA,2022-01-03,1\nAAA,2022-01-04,0\nAAA,2022-01-05,1.2\n";
        let report = parse_prices(csv.as_bytes(), &manifest(&["AAA"])).unwrap();
        assert_eq!(report.series[0].len(), 2);
        assert_eq!(report.row_errors.len(), 1);
        assert_eq!(report.row_errors[0].line, 3);
        assert_eq!(report.row_errors[0].ticker, "AAA");
    }

    #[test]
    fn bad_date_is_row_error() {
        let csv = "ticker,date,close\nAAA,03/01/2022,1\nAAA,2022-01-04,1.1\n";
        let report = parse_prices(csv.as_bytes(), &manifest(&["AAA"])).unwrap();
        assert_eq!(report.series[0].len(), 1);
        assert!(report.row_errors[0].reason.contains("date"));
    }

    #[test]
    fn missing_ticker_is_named() {
        let csv = "ticker,date,close\nAAA,2022-01-03,1\n";
        let err = parse_prices(csv.as_bytes(), &manifest(&["AAA", "FLMB"])).unwrap_err();
        assert!(matches!(err, IngestError::MissingTicker(ref t) if t == "FLMB"));
        assert!(err.to_string().contains("FLMB"));
    }

    #[test]
    fn duplicate_rows_rejected() {
        let csv = "ticker,date,close\nAAA,2022-01-03,1\nAAA,2022-01-03,1.1\n";
        let err = parse_prices(csv.as_bytes(), &manifest(&["AAA"])).unwrap_err();
        assert!(matches!(err, IngestError::DuplicateRow { line: 3, .. }));
    }

    #[test]
    fn unsorted_long_rows_are_ordered() {
        let csv = "ticker,date,close\nAAA,2022-01-05,3\nAAA,2022-01-03,1\nAAA,2022-01-04,2\n";
        let report = parse_prices(csv.as_bytes(), &manifest(&["AAA"])).unwrap();
        let closes: Vec<f64> = report.series[0].observations().iter().map(|p| p.close).collect();
        assert_eq!(closes, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn unknown_layout() {
        let err = parse_prices("foo,bar\n1,2\n".as_bytes(), &manifest(&["AAA"])).unwrap_err();
        assert!(matches!(err, IngestError::UnknownLayout(_)));
    }

    #[test]
    fn manifest_parsing() {
        let text = "ticker,name,currency,market\nFLMB,Franklin Municipal Green Bond ETF,USD,US\nHGGB,\"Horizons S&P GreenBond Index ETF\",CAD,Canada\n";
        let m = Manifest::from_reader(text.as_bytes()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.get("HGGB").unwrap().market, Market::Canada);
        let dup = "ticker,name,currency,market\nA,a,USD,US\nA,b,USD,US\n";
        assert!(matches!(
            Manifest::from_reader(dup.as_bytes()),
            Err(IngestError::DuplicateTicker(_))
        ));
        let bad = "ticker,name,currency,market\nA,a,USD,Mars\n";
        assert!(matches!(
            Manifest::from_reader(bad.as_bytes()),
            Err(IngestError::Manifest { line: 2, .. })
        ));
    }

    #[test]
    fn log_return_examples() {
        let r = log_returns(&prices(&[100.0, 100.0])).unwrap();
        assert_eq!(r.values(), &[0.0]);
        let r = log_returns(&prices(&[100.0, 100.0 * std::f64::consts::E])).unwrap();
        assert!((r.values()[0] - 1.0).abs() < 1e-12);
        let r = log_returns(&prices(&[100.0, 99.0, 101.0])).unwrap();
        assert!((r.values()[0] - (-0.010_050_335_853_501_4)).abs() < 1e-12);
        assert!((r.values()[1] - 0.020_000_666_706_669_3).abs() < 1e-12);
        assert_eq!(r.dates()[0], d("2022-01-04"));
        assert!(matches!(
            log_returns(&prices(&[100.0])),
            Err(IngestError::TooShort { needed: 2, .. })
        ));
    }

    fn dated(dates: &[&str], values: &[f64]) -> ReturnSeries {
        ReturnSeries::new(
            InstrumentMeta::synthetic("X", Market::US),
            dates.iter().map(|s| d(s)).collect(),
            values.to_vec(),
        )
    }

    #[test]
    fn align_examples() {
        let a = dated(&["2022-01-03", "2022-01-04", "2022-01-05"], &[1.0, 2.0, 3.0]);
        let (x, y) = align_pair(&a, &a).unwrap();
        assert_eq!(x, a);
        assert_eq!(y, a);

        let b = dated(&["2022-01-04", "2022-01-05", "2022-01-06"], &[20.0, 30.0, 40.0]);
        let (x, y) = align_pair(&a, &b).unwrap();
        assert_eq!(x.dates(), &[d("2022-01-04"), d("2022-01-05")]);
        assert_eq!(x.dates(), y.dates());
        assert_eq!(x.values(), &[2.0, 3.0]);
        assert_eq!(y.values(), &[20.0, 30.0]);

        let c = dated(&["2023-01-04"], &[1.0]);
        assert!(matches!(align_pair(&a, &c), Err(IngestError::EmptyIntersection(..))));
    }

    #[test]
    fn describe_examples() {
        let meta = InstrumentMeta::synthetic("C", Market::US);
        let s = describe(&ReturnSeries::from_values(meta.clone(), vec![0.001; 10])).unwrap();
        assert!((s.mean - 0.001).abs() < 1e-15);
        assert!(s.std_dev.abs() < 1e-15);
        assert!(s.skewness.is_none() && s.kurtosis.is_none());

        let alt: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let s = describe(&ReturnSeries::from_values(meta.clone(), alt)).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.skewness, Some(0.0));
        // two-point distribution: m4/m2^2 = 1
        assert!((s.kurtosis.unwrap() - 1.0).abs() < 1e-12);

        assert!(describe(&ReturnSeries::from_values(meta, vec![1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn describe_against_hand_values() {
        // x = 1,2,3,4,10: mean 4, deviations -3,-2,-1,0,6
        // sum d^2 = 50, sum d^3 = 180, sum d^4 = 1394
        let meta = InstrumentMeta::synthetic("H", Market::US);
        let s = describe(&ReturnSeries::from_values(meta, vec![1.0, 2.0, 3.0, 4.0, 10.0])).unwrap();
        assert!((s.mean - 4.0).abs() < 1e-12);
        assert!((s.std_dev - (50.0f64 / 4.0).sqrt()).abs() < 1e-12);
        let (m2, m3, m4) = (10.0f64, 36.0f64, 278.8f64);
        let g1 = m3 / m2.powf(1.5);
        assert!((s.skewness.unwrap() - (20.0f64).sqrt() / 3.0 * g1).abs() < 1e-12);
        assert!((s.kurtosis.unwrap() - m4 / (m2 * m2)).abs() < 1e-12);
    }
}
