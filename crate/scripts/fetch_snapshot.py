#!/usr/bin/env python3
"""Fetch daily closes for the manifest tickers from Yahoo Finance's chart API.

Writes a long-format CSV (ticker,date,close) suitable for `teflow --prices`.

    python3 scripts/fetch_snapshot.py --out data/prices_yahoo.csv \
        --symbol HGGB=HGGB.TO --symbol FLRG=FLRG.L

Manifest tickers are used as provider symbols unless remapped with --symbol.
Requires network access; the bundled data/prices.csv is synthetic.
"""

import argparse
import csv
import datetime as dt
import sys

import requests

URL = "https://query1.finance.yahoo.com/v8/finance/chart/{symbol}"


def epoch(day):
    return int(dt.datetime.combine(day, dt.time(), tzinfo=dt.timezone.utc).timestamp())


def fetch(symbol, start, end):
    params = {"period1": epoch(start), "period2": epoch(end + dt.timedelta(days=1)), "interval": "1d"}
    resp = requests.get(URL.format(symbol=symbol), params=params, timeout=30,
                        headers={"User-Agent": "Mozilla/5.0"})
    resp.raise_for_status()
    result = resp.json()["chart"]["result"][0]
    closes = result["indicators"]["quote"][0]["close"]
    for ts, close in zip(result["timestamp"], closes):
        if close is not None:
            yield dt.datetime.fromtimestamp(ts, dt.timezone.utc).date(), close


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--manifest", default="data/manifest.csv")
    ap.add_argument("--out", required=True)
    ap.add_argument("--start", default="2021-08-06", type=dt.date.fromisoformat)
    ap.add_argument("--end", default="2022-10-28", type=dt.date.fromisoformat)
    ap.add_argument("--symbol", action="append", default=[], help="TICKER=PROVIDER_SYMBOL")
    args = ap.parse_args()

    remap = dict(s.split("=", 1) for s in args.symbol)
    tickers = [row["ticker"] for row in csv.DictReader(open(args.manifest))]
    with open(args.out, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["ticker", "date", "close"])
        for ticker in tickers:
            symbol = remap.get(ticker, ticker)
            try:
                rows = list(fetch(symbol, args.start, args.end))
            except Exception as exc:  # report and continue with the rest
                print(f"{ticker} ({symbol}): {exc}", file=sys.stderr)
                continue
            for day, close in rows:
                out.writerow([ticker, day.isoformat(), f"{close:.6f}"])
            print(f"{ticker}: {len(rows)} closes", file=sys.stderr)


if __name__ == "__main__":
    main()
