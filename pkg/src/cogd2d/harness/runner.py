"""Sweep execution and CSV emission.

One output row per (sweep value, policy, D2D-channel side, engine).  When
a config carries several D2D modes (no-D2D / non-cognitive / cognitive),
each mode goes to its own file with a ``_<mode>`` suffix so the column
schema stays fixed.  Cells a branch cannot produce (e.g. closed-form
cellular outage when alpha != beta) are left empty and the run continues.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path

from .. import cellular, d2d
from ..mc import McSettings, estimate_metrics
from ..params import Policy, Side
from ..spectrum import CellLoadDist
from .config import ExperimentConfig

log = logging.getLogger(__name__)

CSV_HEADER = (
    "sweep_var,value,policy,cd_side,p_s,p_f,p_t,O_D,O_D_tot,"
    "O_B_cd,O_B_other,O_B_avg,O_B_tot,source,ci_halfwidth"
)

_METRIC_FIELDS = (
    "p_s",
    "p_f",
    "p_t",
    "O_D",
    "O_D_tot",
    "O_B_cd",
    "O_B_other",
    "O_B_avg",
    "O_B_tot",
)


@dataclass
class ResultRow:
    sweep_var: str
    value: float
    policy: str
    cd_side: str
    d2d_mode: str
    source: str
    metrics: dict[str, float | None]
    ci_halfwidth: float | None


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".12g")


def row_to_csv(row: ResultRow) -> str:
    cells = [row.sweep_var, _fmt(row.value), row.policy, row.cd_side]
    cells += [_fmt(row.metrics.get(k)) for k in _METRIC_FIELDS]
    cells += [row.source, _fmt(row.ci_halfwidth)]
    return ",".join(cells)


def _analytic_row(config, value, policy, side, mode) -> ResultRow:
    params = config.at(value).network_params(mode)
    plan = config.at(value).channel_plan(Side(side), Policy(policy))
    dist = CellLoadDist(params.mean_load)
    metrics: dict[str, float | None] = {k: None for k in _METRIC_FIELDS}
    try:
        dm = d2d.evaluate(params, plan, dist=dist)
        p_s, p_f = dm.p_s, dm.p_f
        if mode == "noncognitive":
            p_s = p_f = 1.0
            o_d = d2d.sinr_outage(params, plan, p_s, p_f, dm.q_d)
            dm_vals = dict(p_s=1.0, p_f=1.0, p_t=1.0, O_D=o_d, O_D_tot=o_d)
        else:
            dm_vals = dict(p_s=dm.p_s, p_f=dm.p_f, p_t=dm.p_t, O_D=dm.o_d, O_D_tot=dm.o_d_tot)
        metrics.update(dm_vals)
    except (ValueError, ArithmeticError) as exc:
        log.warning("analytic D2D metrics unavailable at %s=%s: %s", config.sweep_var, value, exc)
        p_s = p_f = 0.0
    try:
        cm = cellular.evaluate(params, plan, p_s, p_f, dist=dist)
        metrics.update(
            O_B_cd=cm.outage_cd,
            O_B_other=cm.outage_other,
            O_B_avg=cm.outage_avg,
            O_B_tot=cm.outage_tot,
        )
    except (ValueError, ArithmeticError) as exc:
        log.info("closed-form cellular outage unavailable at %s=%s: %s",
                 config.sweep_var, value, exc)
    return ResultRow(config.sweep_var, value, policy, side, mode, "analytic", metrics, None)


def _mc_row(config, value, policy, side, mode) -> ResultRow:
    bound = config.at(value)
    params = bound.network_params(mode)
    plan = bound.channel_plan(Side(side), Policy(policy))
    settings = McSettings(
        boundary=bound.boundary,
        workers=bound.workers or None,
        d2d_mode="noncognitive" if mode == "noncognitive" else "cognitive",
    )
    mm = estimate_metrics(
        params,
        plan,
        window_side=bound.window_km * 1e3,
        n_iters=bound.iterations,
        base_seed=bound.seed,
        sensing_mode=bound.sensing_mode,
        settings=settings,
    )
    pairs = {
        "p_s": mm.p_s,
        "p_f": mm.p_f,
        "p_t": mm.p_t,
        "O_D": mm.o_d,
        "O_D_tot": mm.o_d_tot,
        "O_B_cd": mm.o_b_cd,
        "O_B_other": mm.o_b_other,
        "O_B_avg": mm.o_b_avg,
        "O_B_tot": mm.o_b_tot,
    }
    metrics: dict[str, float | None] = {}
    cis = []
    for key, est in pairs.items():
        if est is None or math.isnan(est.mean):
            metrics[key] = None
            continue
        metrics[key] = est.mean
        if math.isfinite(est.ci_halfwidth):
            cis.append(est.ci_halfwidth)
    ci = max(cis) if cis else None
    return ResultRow(config.sweep_var, value, policy, side, mode, "mc", metrics, ci)


def run_experiment(config: ExperimentConfig) -> dict[str, list[ResultRow]]:
    """Run the sweep; returns rows grouped by D2D mode (preserving order)."""
    engines = ("analytic", "mc") if config.engines == "both" else (config.engines,)
    grouped: dict[str, list[ResultRow]] = {m: [] for m in config.d2d_modes}
    for mode in config.d2d_modes:
        for value in config.sweep_values:
            for side in config.cd_sides:
                for policy in config.policies:
                    for engine in engines:
                        maker = _analytic_row if engine == "analytic" else _mc_row
                        grouped[mode].append(maker(config, value, policy, side, mode))
    return grouped


def _suffixed(path: Path, tag: str) -> Path:
    return path.with_name(f"{path.stem}_{tag}{path.suffix or '.csv'}")


def write_csv(rows: list[ResultRow], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [CSV_HEADER] + [row_to_csv(r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def write_outputs(grouped: dict[str, list[ResultRow]], out_path: str | Path) -> list[Path]:
    """One CSV per D2D mode; single-mode runs write exactly ``out_path``."""
    out_path = Path(out_path)
    if len(grouped) == 1:
        rows = next(iter(grouped.values()))
        return [write_csv(rows, out_path)]
    return [write_csv(rows, _suffixed(out_path, mode)) for mode, rows in grouped.items()]
