import math
import os

import pytest

from holoplot.data import (
    MissingColumnError,
    aggregate_records,
    load_results,
    read_records,
    read_summary,
)

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "records.csv")


def test_read_records_types():
    rows = read_records(GOLDEN)
    assert len(rows) == 49
    first = rows[0]
    assert first["p_t_watts"] == 3.0 and isinstance(first["p_t_watts"], float)
    assert first["k_users"] == 4 and isinstance(first["k_users"], int)
    assert first["coupling"] is False
    assert first["skipped"] == 0
    assert rows[-1]["skipped"] == 1
    assert math.isnan(rows[-1]["sum_rate_bpshz"])


def test_missing_column(tmp_path):
    path = tmp_path / "records.csv"
    path.write_text("p_t_watts,k_users\n3.0,4\n")
    with pytest.raises(MissingColumnError, match="n_t"):
        read_records(path)


def test_aggregate_matches_hand_values():
    rows = aggregate_records(read_records(GOLDEN))
    cell = next(
        r
        for r in rows
        if r["p_t_watts"] == 3.0 and r["ris_mode"] == "optimized"
    )
    assert cell["mean_sum_rate_bpshz"] == 12.0
    assert cell["std_sum_rate_bpshz"] == 2.0
    assert cell["count"] == 2 and cell["skipped"] == 0


def test_aggregate_keeps_empty_cell():
    rows = aggregate_records(read_records(GOLDEN))
    cell = next(r for r in rows if r["p_t_watts"] == 50.0)
    assert cell["count"] == 0
    assert cell["skipped"] == 1
    assert math.isnan(cell["mean_sum_rate_bpshz"])


def test_load_results_prefers_summary(tmp_path):
    records = (
        "p_t_watts,k_users,n_t,n_ris,ris_mode,coupling,csi_mode,realization,seed,"
        "sum_rate_bpshz,iters_outer,iters_dinkelbach_total,iters_rcg_total,skipped\n"
        "3.0,4,64,100,optimized,false,perfect,0,1,10.0,5,1,1,0\n"
    )
    summary = (
        "p_t_watts,k_users,n_t,n_ris,ris_mode,coupling,csi_mode,count,skipped,"
        "mean_sum_rate_bpshz,std_sum_rate_bpshz\n"
        "3.0,4,64,100,optimized,false,perfect,1,0,99.0,0.0\n"
    )
    (tmp_path / "records.csv").write_text(records)
    (tmp_path / "summary.csv").write_text(summary)
    rows = load_results(tmp_path)
    assert rows[0]["mean_sum_rate_bpshz"] == 99.0  # summary wins


def test_load_results_falls_back_to_records(tmp_path):
    records = (
        "p_t_watts,k_users,n_t,n_ris,ris_mode,coupling,csi_mode,realization,seed,"
        "sum_rate_bpshz,iters_outer,iters_dinkelbach_total,iters_rcg_total,skipped\n"
        "3.0,4,64,100,optimized,false,perfect,0,1,10.0,5,1,1,0\n"
        "3.0,4,64,100,optimized,false,perfect,1,1,14.0,5,1,1,0\n"
    )
    (tmp_path / "records.csv").write_text(records)
    rows = load_results(tmp_path)
    assert rows[0]["mean_sum_rate_bpshz"] == 12.0
    assert rows[0]["std_sum_rate_bpshz"] == 2.0


def test_load_results_empty_dir(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_results(tmp_path)


def test_read_summary_roundtrip(tmp_path):
    summary = (
        "p_t_watts,k_users,n_t,n_ris,ris_mode,coupling,csi_mode,count,skipped,"
        "mean_sum_rate_bpshz,std_sum_rate_bpshz\n"
        "15.0,4,64,100,none,true,imperfect,7,1,10.5,0.25\n"
    )
    path = tmp_path / "summary.csv"
    path.write_text(summary)
    row = read_summary(path)[0]
    assert row["coupling"] is True
    assert row["count"] == 7
    assert row["std_sum_rate_bpshz"] == 0.25
