"""Monte-Carlo sweep harness: seeded paired runs over one scenario axis,
aggregation, and flat-file output (records.csv / summary.csv / manifest.txt).
"""

from __future__ import annotations

import csv
import datetime
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import config as config_mod
from .am_driver import am_optimize
from .channel import generate_channels, perturb_csi
from .digital_bf import ZfInfeasibleError
from .rhs import build_geometry

SWEEP_AXES = (
    "p_t_watts",
    "k_users",
    "n_ris",
    "n_t",
    "ris_mode",
    "csi_mode",
    "coupling_enabled",
)

SCHEMES = ("optimized", "random", "none")


@dataclass(frozen=True)
class SweepRecord:
    """One Monte-Carlo result row."""

    p_t_watts: float
    k_users: int
    n_t: int
    n_ris: int
    ris_mode: str
    coupling: bool
    csi_mode: str
    realization: int
    seed: int
    sum_rate_bpshz: float
    per_user_rates: tuple
    iters_outer: int
    iters_dinkelbach_total: int
    iters_rcg_total: int
    skipped: bool
    value_index: int  # ordering key, not written to CSV


@dataclass(frozen=True)
class CostModel:
    """Hardware-cost comparison inputs: a holographic surface needs about
    2.5x the element count of a phased array of equal directivity, while a
    phased-array module costs cost_ratio times the holographic one (typical
    ratio 10); radiated-to-consumed power fractions are 4% vs 25%."""

    n_t: int
    cost_ratio: float = 10.0
    unit_cost: float = 1.0
    element_multiplier: float = 2.5
    radiation_efficiency_phased: float = 0.04
    radiation_efficiency_rhs: float = 0.25

    def __post_init__(self):
        for name in (
            "n_t",
            "cost_ratio",
            "unit_cost",
            "element_multiplier",
            "radiation_efficiency_phased",
            "radiation_efficiency_rhs",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"cost model field {name} must be positive")


def hardware_cost(cm: CostModel):
    """(holographic surface cost, phased array cost) for equal directivity."""
    rhs_cost = cm.element_multiplier * cm.n_t * cm.unit_cost
    phased_cost = cm.n_t * cm.cost_ratio * cm.unit_cost
    return rhs_cost, phased_cost


def near_square_factors(n):
    """(a, b) with a * b = n and a the largest divisor not above sqrt(n)."""
    a = int(math.isqrt(n))
    while n % a:
        a -= 1
    return a, n // a


def apply_axis(cfg, axis, value):
    """Derive the scenario for one sweep point."""
    if axis == "p_t_watts":
        return config_mod.replace(cfg, p_t_watts=float(value))
    if axis == "k_users":
        k = int(value)
        if k > len(cfg.ue_positions):
            raise ValueError(
                f"sweep value k_users={k} exceeds the {len(cfg.ue_positions)} configured UE positions"
            )
        return config_mod.replace(cfg, k_users=k, ue_positions=cfg.ue_positions[:k])
    if axis == "n_ris":
        a, b = near_square_factors(int(value))
        return config_mod.replace(cfg, n_ris_x=a, n_ris_y=b)
    if axis == "n_t":
        a, b = near_square_factors(int(value))
        return config_mod.replace(cfg, n_t_x=a, n_t_y=b)
    if axis == "ris_mode":
        return config_mod.replace(cfg, ris_mode=str(value))
    if axis == "csi_mode":
        return config_mod.replace(cfg, csi_mode=str(value))
    if axis == "coupling_enabled":
        return config_mod.replace(cfg, coupling_enabled=bool(value))
    raise ValueError(f"unknown sweep axis {axis!r}")


def _cell_seed_sequence(master_seed, axis, value_index, realization):
    # ris_mode values must share channel draws (paired schemes), so the mode
    # axis does not enter the derivation. Appending sweep values never shifts
    # the draws of existing cells.
    index = 0 if axis == "ris_mode" else value_index
    return np.random.SeedSequence([master_seed, index, realization])


def _run_cell(args):
    """All scheme runs for one (axis value, realization) cell."""
    cfg, axis, value_index, value, realization = args
    cfg_v = apply_axis(cfg, axis, value)
    seed_seq = _cell_seed_sequence(cfg.seed, axis, value_index, realization)
    child_seed = int(seed_seq.generate_state(1, dtype=np.uint64)[0])
    channel_ss, csi_ss, init_ss = seed_seq.spawn(3)

    channels_true = generate_channels(cfg_v, np.random.default_rng(channel_ss))
    geom = build_geometry(cfg_v)
    modes = (cfg_v.ris_mode,) if axis == "ris_mode" else SCHEMES

    records = []
    for mode in modes:
        cfg_m = config_mod.replace(cfg_v, ris_mode=mode)
        if cfg_m.csi_mode == "imperfect":
            channels_obs = perturb_csi(
                channels_true, cfg_m.csi_error_radius_factor, np.random.default_rng(csi_ss)
            )
        else:
            channels_obs = channels_true
        init_rng = np.random.default_rng(init_ss)  # identical stream per mode
        try:
            # am_optimize dispatches on cfg_m.ris_mode, so baselines run here
            # too, with solvers seeing the observed set and rates reported on
            # the true one.
            result = am_optimize(cfg_m, channels_true, channels_obs, geom, init_rng)
            record = SweepRecord(
                p_t_watts=cfg_m.p_t_watts,
                k_users=cfg_m.k_users,
                n_t=cfg_m.n_t,
                n_ris=cfg_m.n_ris,
                ris_mode=mode,
                coupling=cfg_m.coupling_enabled,
                csi_mode=cfg_m.csi_mode,
                realization=realization,
                seed=child_seed,
                sum_rate_bpshz=result.state.sum_rate,
                per_user_rates=tuple(float(r) for r in result.state.per_user_rates),
                iters_outer=result.iters_outer,
                iters_dinkelbach_total=result.iters_dinkelbach,
                iters_rcg_total=result.iters_rcg,
                skipped=False,
                value_index=value_index,
            )
        except ZfInfeasibleError:
            record = SweepRecord(
                p_t_watts=cfg_m.p_t_watts,
                k_users=cfg_m.k_users,
                n_t=cfg_m.n_t,
                n_ris=cfg_m.n_ris,
                ris_mode=mode,
                coupling=cfg_m.coupling_enabled,
                csi_mode=cfg_m.csi_mode,
                realization=realization,
                seed=child_seed,
                sum_rate_bpshz=float("nan"),
                per_user_rates=(),
                iters_outer=0,
                iters_dinkelbach_total=0,
                iters_rcg_total=0,
                skipped=True,
                value_index=value_index,
            )
        records.append(record)
    return records


def run_sweep(cfg, axis, values, jobs=1):
    """Run every (axis value, realization, scheme) combination.

    Child seeds derive from (master seed, value index, realization) so every
    scheme within a cell, and every ris_mode sweep value, reuses the same
    channel draws. Output ordering is independent of the worker count.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}")
    tasks = [
        (cfg, axis, vi, value, r)
        for vi, value in enumerate(values)
        for r in range(cfg.realizations)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            nested = list(pool.map(_run_cell, tasks, chunksize=1))
    else:
        nested = [_run_cell(t) for t in tasks]
    records = [rec for cell in nested for rec in cell]
    scheme_rank = {mode: i for i, mode in enumerate(SCHEMES)}
    records.sort(
        key=lambda r: (r.value_index, r.realization, scheme_rank.get(r.ris_mode, 99))
    )
    return records


def aggregate(records):
    """Per-cell summary rows: population mean/std of the sum-rate over the
    non-skipped records, plus counts. Cells whose runs were all skipped stay
    visible with count 0 and NaN statistics."""
    cells = {}
    order = []
    for rec in records:
        key = (
            rec.p_t_watts,
            rec.k_users,
            rec.n_t,
            rec.n_ris,
            rec.ris_mode,
            rec.coupling,
            rec.csi_mode,
        )
        if key not in cells:
            cells[key] = []
            order.append(key)
        cells[key].append(rec)
    rows = []
    for key in order:
        recs = cells[key]
        rates = [r.sum_rate_bpshz for r in recs if not r.skipped]
        skipped = sum(1 for r in recs if r.skipped)
        if rates:
            mean = float(np.mean(rates))
            std = float(np.std(rates))
        else:
            mean = float("nan")
            std = float("nan")
        rows.append(
            {
                "p_t_watts": key[0],
                "k_users": key[1],
                "n_t": key[2],
                "n_ris": key[3],
                "ris_mode": key[4],
                "coupling": key[5],
                "csi_mode": key[6],
                "count": len(rates),
                "skipped": skipped,
                "mean_sum_rate_bpshz": mean,
                "std_sum_rate_bpshz": std,
            }
        )
    return rows


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))  # plain-float repr even for numpy scalars
    return str(value)


def write_records(records, path):
    """records.csv with a fixed column set; per-user columns are sized by the
    largest user count present and left empty elsewhere."""
    k_max = max((len(r.per_user_rates) for r in records), default=0)
    header = [
        "p_t_watts",
        "k_users",
        "n_t",
        "n_ris",
        "ris_mode",
        "coupling",
        "csi_mode",
        "realization",
        "seed",
        "sum_rate_bpshz",
        *[f"rate_user_{i}" for i in range(k_max)],
        "iters_outer",
        "iters_dinkelbach_total",
        "iters_rcg_total",
        "skipped",
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in records:
            users = [_fmt(v) for v in r.per_user_rates]
            users += [""] * (k_max - len(users))
            writer.writerow(
                [
                    _fmt(r.p_t_watts),
                    r.k_users,
                    r.n_t,
                    r.n_ris,
                    r.ris_mode,
                    _fmt(r.coupling),
                    r.csi_mode,
                    r.realization,
                    r.seed,
                    _fmt(r.sum_rate_bpshz),
                    *users,
                    r.iters_outer,
                    r.iters_dinkelbach_total,
                    r.iters_rcg_total,
                    1 if r.skipped else 0,
                ]
            )


def write_summary(rows, path):
    header = [
        "p_t_watts",
        "k_users",
        "n_t",
        "n_ris",
        "ris_mode",
        "coupling",
        "csi_mode",
        "count",
        "skipped",
        "mean_sum_rate_bpshz",
        "std_sum_rate_bpshz",
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[col]) for col in header])


def write_manifest(cfg, axis, values, path, version):
    import dataclasses as dc

    lines = [
        f"holobeam {version}",
        f"timestamp {datetime.datetime.now(datetime.timezone.utc).isoformat()}",
        f"sweep_axis {axis}",
        f"sweep_values {','.join(str(v) for v in values)}",
    ]
    for field in dc.fields(cfg):
        lines.append(f"config.{field.name} {getattr(cfg, field.name)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
