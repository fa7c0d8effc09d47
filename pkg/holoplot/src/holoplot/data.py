"""Readers for the sweep harness output files.

Consumes only the documented flat-file interfaces: records.csv (one row per
scenario/realization/scheme) and summary.csv (per-cell mean/std/count). When
a results directory lacks summary.csv, records.csv is aggregated here with
the same semantics the harness uses: skipped rows excluded from statistics
but counted, population standard deviation, and all-skipped cells kept
visible with count 0 and NaN statistics.
"""

from __future__ import annotations

import csv
import math
import os

SCENARIO_KEYS = (
    "p_t_watts",
    "k_users",
    "n_t",
    "n_ris",
    "ris_mode",
    "coupling",
    "csi_mode",
)

_CASTS = {
    "p_t_watts": float,
    "k_users": int,
    "n_t": int,
    "n_ris": int,
    "ris_mode": str,
    "coupling": lambda s: s.strip().lower() == "true",
    "csi_mode": str,
    "realization": int,
    "seed": int,
    "sum_rate_bpshz": float,
    "count": int,
    "skipped": int,
    "mean_sum_rate_bpshz": float,
    "std_sum_rate_bpshz": float,
}


class MissingColumnError(ValueError):
    pass


def _read_csv(path, required):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise MissingColumnError(f"{os.path.basename(path)} missing column {column!r}")
        rows = []
        for raw in reader:
            row = {}
            for key, value in raw.items():
                cast = _CASTS.get(key)
                row[key] = cast(value) if cast and value != "" else value
            rows.append(row)
    return rows


def read_summary(path):
    """Parse summary.csv into typed rows."""
    required = SCENARIO_KEYS + ("count", "skipped", "mean_sum_rate_bpshz", "std_sum_rate_bpshz")
    return _read_csv(path, required)


def read_records(path):
    """Parse records.csv into typed rows."""
    required = SCENARIO_KEYS + ("realization", "sum_rate_bpshz", "skipped")
    return _read_csv(path, required)


def aggregate_records(records):
    """Per-cell summary rows from raw records (harness semantics)."""
    cells = {}
    order = []
    for rec in records:
        key = tuple(rec[k] for k in SCENARIO_KEYS)
        if key not in cells:
            cells[key] = []
            order.append(key)
        cells[key].append(rec)
    rows = []
    for key in order:
        recs = cells[key]
        rates = [r["sum_rate_bpshz"] for r in recs if not r["skipped"]]
        n = len(rates)
        if n:
            mean = sum(rates) / n
            std = math.sqrt(sum((x - mean) ** 2 for x in rates) / n)
        else:
            mean = float("nan")
            std = float("nan")
        row = dict(zip(SCENARIO_KEYS, key))
        row.update(
            count=n,
            skipped=sum(1 for r in recs if r["skipped"]),
            mean_sum_rate_bpshz=mean,
            std_sum_rate_bpshz=std,
        )
        rows.append(row)
    return rows


def load_results(directory):
    """Summary rows for a results directory: summary.csv when present,
    otherwise aggregated from records.csv."""
    summary_path = os.path.join(directory, "summary.csv")
    if os.path.exists(summary_path):
        return read_summary(summary_path)
    records_path = os.path.join(directory, "records.csv")
    if os.path.exists(records_path):
        return aggregate_records(read_records(records_path))
    raise FileNotFoundError(f"no summary.csv or records.csv in {directory}")
