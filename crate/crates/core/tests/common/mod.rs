#![allow(dead_code)]

use teflow::ingest::{InstrumentMeta, Market};
use teflow::symbolize::SymbolSeries;

pub fn series(ticker: &str, symbols: &[u8], alphabet: usize) -> SymbolSeries {
    SymbolSeries::new(InstrumentMeta::synthetic(ticker, Market::US), symbols.to_vec(), alphabet).unwrap()
}

/// Transfer entropy `y -> x` for k = l = 1 by direct enumeration of every
/// state of the alphabet, counting each probability straight from the series.
pub fn brute_force_te(x: &[u8], y: &[u8], alphabet: u8) -> f64 {
    let n = x.len() - 1;
    let count = |pred: &dyn Fn(usize) -> bool| (0..n).filter(|&t| pred(t)).count() as f64;
    let mut te = 0.0;
    for next in 0..alphabet {
        for xs in 0..alphabet {
            for ys in 0..alphabet {
                let joint = count(&|t| x[t + 1] == next && x[t] == xs && y[t] == ys);
                if joint == 0.0 {
                    continue;
                }
                let p_joint = joint / n as f64;
                let p_xy = count(&|t| x[t] == xs && y[t] == ys) / n as f64;
                let p_nx = count(&|t| x[t + 1] == next && x[t] == xs) / n as f64;
                let p_x = count(&|t| x[t] == xs) / n as f64;
                let cond_full = p_joint / p_xy;
                let cond_self = p_nx / p_x;
                te += p_joint * (cond_full / cond_self).log2();
            }
        }
    }
    te.max(0.0)
}
