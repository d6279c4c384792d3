"""Iteration driver: deterministic substreams, parallel execution, estimates.

Each iteration i draws its randomness from
``SeedSequence(base_seed, spawn_key=(i, stage))`` with one stage per
sampling step (snapshot, schedule, harvesting, sensing, link SINR,
cellular SINR).  Per-iteration results are reduced in iteration order, so
the estimates are bit-identical for any worker count.

Estimates are ratios of counts accumulated across iterations.  Their
confidence intervals treat iterations as independent clusters (the
standard ratio-estimator variance); the textbook Bernoulli half-width is
available separately for genuinely independent trials, but applying it to
within-snapshot tallies would understate the uncertainty.
"""

import math
import os
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from ..params import ChannelPlan, NetworkParams
from .measure import (
    cellular_class_outcomes,
    channel_free_all,
    d2d_link_outage,
    harvested_power_all,
)
from .realization import sample_realization
from .schedule import associate_and_schedule

# statistics layout (one row per iteration)
_N_D2D, _N_HARVEST, _N_FREE, _N_ACTIVE = range(4)
_N_FREE_PROBED, _N_PROBE_FAIL, _N_ACT_FAIL, _N_ANY_FAIL = 4, 5, 6, 7
_N_USERS, _N_SERVED = 8, 9
_N_BS, _N_BS_CD, _N_NONCD_PAIRS = 10, 11, 12
_SUM_PU_MOM, _N_UL = 13, 14
_CD_TOT, _CD_TAG, _CD_FAIL = 15, 16, 17
_DLO_TOT, _DLO_TAG, _DLO_FAIL = 18, 19, 20
_ULO_TOT, _ULO_TAG, _ULO_FAIL = 21, 22, 23
_HIST0 = 24

Z_95 = 1.96


@dataclass(frozen=True)
class Estimate:
    """Sample mean with a 95% confidence half-width."""

    mean: float
    n_samples: int
    ci_halfwidth: float

    @staticmethod
    def bernoulli_halfwidth(mean: float, n: int) -> float:
        if n <= 0:
            return math.inf
        return Z_95 * math.sqrt(max(mean * (1.0 - mean), 0.0) / n)

    @classmethod
    def from_bernoulli(cls, successes: int, trials: int) -> "Estimate":
        """Estimate from independent Bernoulli trials."""
        if trials <= 0:
            return cls(math.nan, 0, math.inf)
        mean = successes / trials
        return cls(mean, trials, cls.bernoulli_halfwidth(mean, trials))

    @classmethod
    def from_cluster_counts(cls, numerators, denominators) -> "Estimate":
        """Ratio estimate with iteration-level (cluster) variance."""
        num = np.asarray(numerators, dtype=float)
        den = np.asarray(denominators, dtype=float)
        total = den.sum()
        if total <= 0.0:
            return cls(math.nan, 0, math.inf)
        mean = float(num.sum() / total)
        k = len(num)
        if k < 2:
            return cls(mean, int(total), math.inf)
        resid = num - mean * den
        var = float(resid @ resid) * k / (k - 1) / total**2
        return cls(mean, int(total), Z_95 * math.sqrt(max(var, 0.0)))


@dataclass(frozen=True)
class McSettings:
    """Knobs beyond the core signature of :func:`estimate_metrics`.

    ``boundary``: "torus" wraps distances; "central" keeps the plain
    metric and measures only inside the central quarter-area box.
    ``d2d_mode``: "cognitive" runs harvesting + sensing, "noncognitive"
    declares every D2D transmitter active.
    ``full_load``: saturation probe (every station on every channel).
    ``*_tail_frac``: far-field truncation budgets; 0 disables truncation.
    """

    boundary: str = "torus"
    workers: int | None = None
    harvest_tail_frac: float = 0.005
    interference_tail_frac: float = 0.002
    d2d_mode: str = "cognitive"
    full_load: bool = False
    measure_cellular: bool = True
    load_bins: int = 128
    max_probes: int = 1024          # typical-link probes per snapshot; 0 = all
    max_tagged_per_class: int = 512  # cellular probes per channel class; 0 = all

    def __post_init__(self):
        if self.boundary not in ("torus", "central"):
            raise ValueError("boundary must be 'torus' or 'central'")
        if self.d2d_mode not in ("cognitive", "noncognitive"):
            raise ValueError("d2d_mode must be 'cognitive' or 'noncognitive'")
        if self.load_bins < 8:
            raise ValueError("load_bins must be >= 8")


@dataclass
class McMetrics:
    """Monte Carlo estimates for one parameter point."""

    p_s: Estimate
    p_f: Estimate
    p_t: Estimate
    o_d: Estimate          # typical sensed-free link (the analytic object)
    o_d_active: Estimate   # links that actually transmitted
    o_d_tot: Estimate
    o_b_cd: Estimate
    o_b_other: Estimate
    o_b_avg: Estimate
    o_b_tot: Estimate
    q_f: Estimate
    q_c: Estimate
    q_d: Estimate
    uplink_power_moment: Estimate
    cell_load_pmf: np.ndarray
    n_cells: int
    n_iters: int


def _central_mask(points: np.ndarray, side: float) -> np.ndarray:
    lo, hi = 0.25 * side, 0.75 * side
    return np.all((points >= lo) & (points < hi), axis=1)


def _stat_len(settings: McSettings) -> int:
    return _HIST0 + settings.load_bins


def _iteration_stats(
    params: NetworkParams,
    plan: ChannelPlan,
    window_side: float,
    base_seed: int,
    index: int,
    sensing_mode: str,
    settings: McSettings,
) -> np.ndarray:
    def stream(stage: int) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=base_seed, spawn_key=(index, stage))
        )

    torus = settings.boundary == "torus"
    real = sample_realization(params, window_side, stream(0))
    sched = associate_and_schedule(
        real, params, plan, stream(1), torus=torus, full_load=settings.full_load
    )
    stats = np.zeros(_stat_len(settings))

    n_d = len(real.d2d_tx_xy)
    if torus:
        d2d_meas = np.ones(n_d, dtype=bool)
        user_meas = bs_meas = None
    else:
        d2d_meas = _central_mask(real.d2d_tx_xy, window_side)
        user_meas = _central_mask(real.user_xy, window_side)
        bs_meas = _central_mask(real.bs_xy, window_side)

    if settings.d2d_mode == "noncognitive":
        harvest_ok = np.ones(n_d, dtype=bool)
        free = np.ones(n_d, dtype=bool)
    else:
        power = harvested_power_all(
            real, sched, params, plan, stream(2), torus, settings.harvest_tail_frac
        )
        harvest_ok = power > params.rho_d * params.d_o**params.beta
        free = channel_free_all(real, sched, params, plan, stream(3), sensing_mode, torus)
    active = harvest_ok & free

    n_meas = int(d2d_meas.sum())
    stats[_N_D2D] = n_meas
    stats[_N_HARVEST] = int(np.count_nonzero(harvest_ok & d2d_meas))
    stats[_N_FREE] = int(np.count_nonzero(free & d2d_meas))
    stats[_N_ACTIVE] = int(np.count_nonzero(active & d2d_meas))
    rng_link = stream(4)
    # typical-link outage: a uniform subsample of the sensed-free pairs
    probe = free & d2d_meas
    if settings.max_probes > 0:
        idx = np.nonzero(probe)[0]
        if len(idx) > settings.max_probes:
            keep = rng_link.choice(idx, size=settings.max_probes, replace=False)
            probe = np.zeros_like(probe)
            probe[keep] = True
    n_probe, n_probe_fail, _, _ = d2d_link_outage(
        real, sched, params, plan, rng_link, probe, active, d2d_meas,
        torus, settings.interference_tail_frac,
    )
    stats[_N_FREE_PROBED] = n_probe
    stats[_N_PROBE_FAIL] = n_probe_fail
    # realized outcome of every transmitting link, for the overall outage
    n_act_probe, n_act_fail, _, _ = d2d_link_outage(
        real, sched, params, plan, rng_link, active, active, d2d_meas,
        torus, settings.interference_tail_frac,
    )
    stats[_N_ACT_FAIL] = n_act_fail
    stats[_N_ANY_FAIL] = n_meas - (n_act_probe - n_act_fail)

    n_users = len(real.user_xy)
    stats[_N_USERS] = n_users if user_meas is None else int(user_meas.sum())
    served_meas = (
        len(sched.served_users)
        if user_meas is None
        else int(np.count_nonzero(user_meas[sched.served_users]))
    )
    stats[_N_SERVED] = served_meas

    n_bs = len(real.bs_xy)
    stats[_N_BS] = n_bs
    cd = plan.cd_index
    if n_bs > 0:
        stats[_N_BS_CD] = int(np.count_nonzero(sched.bs_channel_active[:, cd]))
        non_cd = np.delete(np.arange(plan.n_total), cd)
        stats[_N_NONCD_PAIRS] = int(np.count_nonzero(sched.bs_channel_active[:, non_cd]))

    is_ul = sched.served_channel >= plan.n_downlink
    stats[_N_UL] = int(np.count_nonzero(is_ul))
    if stats[_N_UL] > 0:
        stats[_SUM_PU_MOM] = float(
            np.sum(sched.served_ul_power[is_ul] ** (2.0 / params.alpha))
        )

    if settings.measure_cellular:
        classes = cellular_class_outcomes(
            real,
            sched,
            params,
            plan,
            stream(5),
            real.d2d_tx_xy[active],
            torus,
            settings.interference_tail_frac,
            user_measured=user_meas,
            bs_measured=bs_meas,
            max_tagged=settings.max_tagged_per_class,
        )
        for name, (tot_i, tag_i, fail_i) in (
            ("cd", (_CD_TOT, _CD_TAG, _CD_FAIL)),
            ("dl_other", (_DLO_TOT, _DLO_TAG, _DLO_FAIL)),
            ("ul_other", (_ULO_TOT, _ULO_TAG, _ULO_FAIL)),
        ):
            oc = classes[name]
            stats[tot_i] = oc.served_total
            stats[tag_i] = oc.tagged
            stats[fail_i] = oc.failures

    if n_bs > 0:
        hist = np.bincount(
            np.minimum(sched.load, settings.load_bins - 1), minlength=settings.load_bins
        )
        stats[_HIST0:] = hist
    return stats


def _run_chunk(args) -> tuple[np.ndarray, np.ndarray]:
    params, plan, window_side, base_seed, indices, sensing_mode, settings = args
    rows = np.empty((len(indices), _stat_len(settings)))
    for k, i in enumerate(indices):
        rows[k] = _iteration_stats(
            params, plan, window_side, base_seed, int(i), sensing_mode, settings
        )
    return np.asarray(indices), rows


def estimate_metrics(
    params: NetworkParams,
    plan: ChannelPlan,
    window_side: float = 20_000.0,
    n_iters: int = 10_000,
    base_seed: int = 1,
    sensing_mode: str = "faded",
    settings: McSettings = McSettings(),
) -> McMetrics:
    """Run ``n_iters`` independent snapshots and aggregate every estimate."""
    if n_iters < 1:
        raise ValueError("n_iters must be >= 1")
    if sensing_mode not in ("faded", "meandisc"):
        raise ValueError("sensing_mode must be 'faded' or 'meandisc'")

    indices = np.arange(n_iters)
    workers = settings.workers or os.cpu_count() or 1
    workers = min(workers, n_iters)
    stats = np.empty((n_iters, _stat_len(settings)))
    if workers <= 1:
        _, stats = _run_chunk(
            (params, plan, window_side, base_seed, indices, sensing_mode, settings)
        )
    else:
        chunks = np.array_split(indices, workers * 4)
        jobs = [
            (params, plan, window_side, base_seed, c, sensing_mode, settings)
            for c in chunks
            if len(c)
        ]
        # fork: cheap worker startup and no __main__ re-import; results are
        # keyed by iteration index so scheduling order cannot matter
        ctx = get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            for got, rows in pool.imap_unordered(_run_chunk, jobs):
                stats[got] = rows

    def ratio(num_col: int, den_col: int) -> Estimate:
        return Estimate.from_cluster_counts(stats[:, num_col], stats[:, den_col])

    p_s = ratio(_N_HARVEST, _N_D2D)
    p_f = ratio(_N_FREE, _N_D2D)
    p_t = ratio(_N_ACTIVE, _N_D2D)
    o_d = ratio(_N_PROBE_FAIL, _N_FREE_PROBED)
    o_d_active = ratio(_N_ACT_FAIL, _N_ACTIVE)
    o_d_tot = ratio(_N_ANY_FAIL, _N_D2D)
    q_f = ratio(_N_SERVED, _N_USERS)
    q_d = ratio(_N_BS_CD, _N_BS)
    n_noncd = plan.n_total - 1
    q_c = (
        Estimate.from_cluster_counts(stats[:, _N_NONCD_PAIRS], stats[:, _N_BS] * n_noncd)
        if n_noncd > 0
        else Estimate(math.nan, 0, math.inf)
    )
    pu_mom = ratio(_SUM_PU_MOM, _N_UL)

    # per-class outage, then usage-weighted combinations; class counts on
    # the representative channel are inflated to the class total
    def inflation(tot_col: int, tag_col: int) -> float:
        tot, tag = stats[:, tot_col].sum(), stats[:, tag_col].sum()
        if tot == 0.0:
            return 0.0
        return tot / tag if tag > 0 else math.nan

    f_cd = inflation(_CD_TOT, _CD_TAG)
    f_dl = inflation(_DLO_TOT, _DLO_TAG)
    f_ul = inflation(_ULO_TOT, _ULO_TAG)
    o_b_cd = ratio(_CD_FAIL, _CD_TAG)
    if math.isnan(f_cd) or math.isnan(f_dl) or math.isnan(f_ul):
        bad = Estimate(math.nan, 0, math.inf)
        o_b_other = o_b_avg = o_b_tot = bad
    else:
        other_num = f_dl * stats[:, _DLO_FAIL] + f_ul * stats[:, _ULO_FAIL]
        other_den = stats[:, _DLO_TOT] + stats[:, _ULO_TOT]
        o_b_other = Estimate.from_cluster_counts(other_num, other_den)
        avg_num = f_cd * stats[:, _CD_FAIL] + other_num
        avg_den = stats[:, _N_SERVED]
        o_b_avg = Estimate.from_cluster_counts(avg_num, avg_den)
        tot_num = (stats[:, _N_USERS] - stats[:, _N_SERVED]) + avg_num
        o_b_tot = Estimate.from_cluster_counts(tot_num, stats[:, _N_USERS])

    hist = stats[:, _HIST0:].sum(axis=0)
    n_cells = int(stats[:, _N_BS].sum())
    pmf = hist / n_cells if n_cells > 0 else hist

    return McMetrics(
        p_s=p_s,
        p_f=p_f,
        p_t=p_t,
        o_d=o_d,
        o_d_active=o_d_active,
        o_d_tot=o_d_tot,
        o_b_cd=o_b_cd,
        o_b_other=o_b_other,
        o_b_avg=o_b_avg,
        o_b_tot=o_b_tot,
        q_f=q_f,
        q_c=q_c,
        q_d=q_d,
        uplink_power_moment=pu_mom,
        cell_load_pmf=pmf,
        n_cells=n_cells,
        n_iters=n_iters,
    )
