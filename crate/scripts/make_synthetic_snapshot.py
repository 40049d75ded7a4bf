#!/usr/bin/env python3
"""Generate the bundled synthetic price snapshot (data/prices.csv).

The snapshot covers the 13 instruments in data/manifest.csv over business days
from 2021-08-06 to 2022-10-28. Each market drops its own exchange holidays, so
pairwise alignment has real work to do. Daily log returns are Student-t draws
scaled to a per-ticker mean and standard deviation, with lag-one couplings
between selected instruments so that the flow pipeline has structure to find.

This is NOT market data. Use scripts/fetch_snapshot.py to build a real
snapshot where network access to a quote provider is available.
"""

import csv
import pathlib

import numpy as np
import pandas as pd

SEED = 20221028
START, END = "2021-08-06", "2022-10-28"

# ticker: (mean, std, kurtosis target)
PARAMS = {
    "BGRN": (-0.00073, 0.00442, 3.09),
    "ECBI": (-0.00090, 0.00594, 3.28),
    "EART.L": (-0.00118, 0.00910, 3.28),
    "FLMB": (-0.00075, 0.00316, 15.8),
    "FLRG": (-0.00079, 0.00427, 4.20),
    "GBNG.L": (-0.00072, 0.00577, 3.66),
    "GRNB": (-0.00069, 0.00379, 4.10),
    "GRON.MI": (-0.00086, 0.00513, 4.79),
    "HGGB": (-0.00061, 0.00268, 5.07),
    "KLMH.F": (-0.00082, 0.00496, 5.15),
    "XCO2": (-0.00058, 0.00472, 5.44),
    "XGBE.DE": (-0.00071, 0.00449, 5.24),
    "XGBU.SW": (-0.00066, 0.00414, 3.95),
}

# (source, destination, loading on the source's previous standardized shock)
COUPLINGS = [
    ("FLMB", "BGRN", 0.45),
    ("FLMB", "GRNB", 0.40),
    ("FLMB", "HGGB", 0.35),
    ("FLMB", "KLMH.F", 0.45),
    ("HGGB", "KLMH.F", 0.35),
    ("HGGB", "EART.L", 0.35),
    ("EART.L", "KLMH.F", 0.50),
    ("FLRG", "KLMH.F", 0.45),
    ("GRON.MI", "KLMH.F", 0.40),
    ("GRON.MI", "FLRG", 0.35),
    ("XGBE.DE", "KLMH.F", 0.40),
    ("BGRN", "XCO2", 0.40),
]

HOLIDAYS = {
    "US": ["2021-09-06", "2021-11-25", "2021-12-24", "2022-01-17", "2022-02-21",
           "2022-04-15", "2022-05-30", "2022-06-20", "2022-07-04", "2022-09-05"],
    "Canada": ["2021-08-02", "2021-09-06", "2021-10-11", "2021-12-27", "2021-12-28",
               "2022-01-03", "2022-02-21", "2022-04-15", "2022-05-23", "2022-07-01",
               "2022-08-01", "2022-09-05", "2022-09-30", "2022-10-10"],
    "Europe": ["2021-08-30", "2021-12-24", "2021-12-27", "2021-12-28", "2022-01-03",
               "2022-04-15", "2022-04-18", "2022-05-02", "2022-06-02", "2022-06-03",
               "2022-08-29", "2022-09-19"],
}


def student_t(rng, kurtosis, size):
    """Unit-variance draws whose population kurtosis matches the target."""
    if kurtosis <= 3.2:
        return rng.standard_normal(size)
    df = 4.0 + 6.0 / (kurtosis - 3.0)
    return rng.standard_t(df, size) / np.sqrt(df / (df - 2.0))


def main():
    root = pathlib.Path(__file__).resolve().parent.parent
    manifest = list(csv.DictReader(open(root / "data" / "manifest.csv")))
    market = {row["ticker"]: row["market"] for row in manifest}
    days = pd.bdate_range(START, END)
    rng = np.random.default_rng(SEED)

    shocks = {t: student_t(rng, PARAMS[t][2], len(days)) for t in PARAMS}
    returns = {}
    for t, (mean, std, _) in PARAMS.items():
        z = shocks[t].copy()
        for src, dst, beta in COUPLINGS:
            if dst == t:
                z[1:] += beta * shocks[src][:-1]
        z /= z.std()
        returns[t] = mean + std * z

    frame = pd.DataFrame(index=days)
    for row in manifest:
        t = row["ticker"]
        prices = 25.0 * np.exp(np.cumsum(returns[t]))
        series = pd.Series(prices, index=days)
        closed = pd.to_datetime(HOLIDAYS[market[t]])
        series[series.index.isin(closed)] = np.nan
        frame[t] = series.round(4)

    frame.index.name = "date"
    frame.to_csv(root / "data" / "prices.csv", date_format="%Y-%m-%d", float_format="%.4f")


if __name__ == "__main__":
    main()
