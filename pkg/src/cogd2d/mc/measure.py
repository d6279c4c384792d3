"""Per-snapshot measurements: harvesting, sensing, and SINR outcomes.

The vectorized ``*_all`` functions are what the engine runs; they truncate
far-field sums at a radius chosen so the *expected* omitted contribution
stays below a small fraction of the relevant power scale (``tail_frac``;
zero disables truncation up to the wrap-around limit).  The per-index
functions compute the same quantities over every source with no cutoff
and serve as slow exact references.

Fading is redrawn independently per (source, channel, destination); a
station transmitting on k downlink channels therefore contributes a
Gamma(k) mixture to the harvested sum (sum of k unit exponentials).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .. import d2d
from ..params import ChannelPlan, NetworkParams, Side
from .geometry import flat_r2, pair_r2, wrap
from .realization import Realization
from .schedule import Schedule

# fading tail cut for sensing candidates: P{h > 40} ~ 4e-18 per pair
_FADING_H_MAX = 40.0
_CHUNK = 2048


def _torus_cap(side: float) -> float:
    return 0.4999 * side


def _harvest_sources(realization, schedule, params, plan):
    """(positions, per-transmission power, fading shape) of every source
    the harvesting circuit hears: stations weighted by their number of
    active downlink channels, plus every transmitting uplink user."""
    n_dl = plan.n_downlink
    k_dl = (
        schedule.bs_channel_active[:, :n_dl].sum(axis=1)
        if n_dl > 0
        else np.zeros(len(realization.bs_xy), dtype=np.int64)
    )
    dl_idx = np.nonzero(k_dl)[0]
    is_ul = schedule.served_channel >= n_dl
    ul_users = schedule.served_users[is_ul]
    ul_pow = schedule.served_ul_power[is_ul]
    src_xy = np.concatenate(
        [realization.bs_xy[dl_idx], realization.user_xy[ul_users]], axis=0
    )
    src_pow = np.concatenate([np.full(len(dl_idx), params.p_b), ul_pow])
    src_shape = np.concatenate([k_dl[dl_idx].astype(float), np.ones(len(ul_users))])
    return src_xy, src_pow, src_shape


def _cd_sources(realization, schedule, params, plan):
    """Positions and powers of transmitters active on the D2D channel."""
    cd = plan.cd_index
    if plan.d2d_side is Side.DOWNLINK:
        idx = np.nonzero(schedule.bs_channel_active[:, cd])[0]
        return realization.bs_xy[idx], np.full(len(idx), params.p_b)
    sel = schedule.served_channel == cd
    users = schedule.served_users[sel]
    return realization.user_xy[users], schedule.served_ul_power[sel]


def harvested_power(
    realization: Realization,
    schedule: Schedule,
    params: NetworkParams,
    plan: ChannelPlan,
    d2d_index: int,
    fading_seed,
    torus: bool = True,
) -> float:
    """Exact harvested power at one D2D transmitter (every source, fresh
    fading drawn from ``fading_seed``)."""
    rng = np.random.default_rng(fading_seed)
    src_xy, src_pow, src_shape = _harvest_sources(realization, schedule, params, plan)
    if len(src_xy) == 0:
        return 0.0
    target = realization.d2d_tx_xy[d2d_index][None, :]
    r2 = pair_r2(src_xy, target, realization.window_side, torus)[:, 0]
    gains = rng.gamma(src_shape)
    with np.errstate(divide="ignore"):
        return float(params.a * np.sum(src_pow * gains * r2 ** (-params.alpha / 2.0)))


def harvested_power_all(
    realization: Realization,
    schedule: Schedule,
    params: NetworkParams,
    plan: ChannelPlan,
    rng: np.random.Generator,
    torus: bool = True,
    tail_frac: float = 0.002,
) -> np.ndarray:
    """Harvested power at every D2D transmitter.

    Sources beyond the truncation radius are dropped; the radius is chosen
    so their expected total is below ``tail_frac`` times the channel
    inversion threshold rho_d * d_o^beta.
    """
    n_d = len(realization.d2d_tx_xy)
    out = np.zeros(n_d)
    if n_d == 0:
        return out
    src_xy, src_pow, src_shape = _harvest_sources(realization, schedule, params, plan)
    if len(src_xy) == 0:
        return out
    side = realization.window_side
    alpha = params.alpha

    radius = math.inf
    if tail_frac > 0.0:
        threshold = params.rho_d * params.d_o**params.beta
        mean_total = params.a * float(np.sum(src_pow * src_shape))
        budget = tail_frac * threshold
        radius = (2.0 * math.pi * mean_total / ((alpha - 2.0) * side * side * budget)) ** (
            1.0 / (alpha - 2.0)
        )
    if torus:
        radius = min(radius, _torus_cap(side))
        tag_xy = wrap(realization.d2d_tx_xy, side)
        tree = cKDTree(tag_xy, boxsize=side)
    else:
        radius = min(radius, math.sqrt(2.0) * side)
        tag_xy = realization.d2d_tx_xy
        tree = cKDTree(tag_xy)

    hits = tree.query_ball_point(wrap(src_xy, side) if torus else src_xy, radius, workers=1)
    counts = np.fromiter((len(h) for h in hits), dtype=np.int64, count=len(hits))
    if counts.sum() == 0:
        return out
    tag_flat = np.concatenate(hits).astype(np.int64)
    src_flat = np.repeat(np.arange(len(src_xy)), counts)
    r2 = flat_r2(src_xy[src_flat], realization.d2d_tx_xy[tag_flat], side, torus)
    gains = rng.gamma(src_shape[src_flat])
    with np.errstate(divide="ignore"):
        contrib = params.a * src_pow[src_flat] * gains * r2 ** (-alpha / 2.0)
    np.add.at(out, tag_flat, contrib)
    return out


def sense_channel(
    realization: Realization,
    schedule: Schedule,
    params: NetworkParams,
    plan: ChannelPlan,
    d2d_index: int,
    mode: str = "faded",
    fading_seed=None,
    torus: bool = True,
) -> bool:
    """True when one D2D transmitter finds the shared channel free.

    ``faded`` compares each active shared-channel transmitter's faded
    received power against the sensing threshold; ``meandisc`` just tests
    membership of the mean protection disc.
    """
    src_xy, src_pow = _cd_sources(realization, schedule, params, plan)
    if len(src_xy) == 0:
        return True
    target = realization.d2d_tx_xy[d2d_index][None, :]
    r2 = pair_r2(src_xy, target, realization.window_side, torus)[:, 0]
    if mode == "meandisc":
        return bool(np.all(r2 > d2d.protection_radius(params, plan) ** 2))
    if mode != "faded":
        raise ValueError(f"unknown sensing mode {mode!r}")
    rng = np.random.default_rng(fading_seed)
    h = rng.exponential(size=len(src_xy))
    with np.errstate(divide="ignore"):
        received = src_pow * h * r2 ** (-params.alpha / 2.0)
    return bool(np.all(received <= params.gamma_sense))


def channel_free_all(
    realization: Realization,
    schedule: Schedule,
    params: NetworkParams,
    plan: ChannelPlan,
    rng: np.random.Generator,
    mode: str = "faded",
    torus: bool = True,
) -> np.ndarray:
    """Free/busy verdict of the sensing step for every D2D transmitter.

    A source can only trip the threshold within the radius where a fading
    gain of 40 would still reach it (miss probability ~ 4e-18 per pair),
    so only those pairs are examined.
    """
    n_d = len(realization.d2d_tx_xy)
    free = np.ones(n_d, dtype=bool)
    if n_d == 0:
        return free
    src_xy, src_pow = _cd_sources(realization, schedule, params, plan)
    if len(src_xy) == 0:
        return free
    side = realization.window_side
    alpha = params.alpha

    if mode == "meandisc":
        radii = np.full(len(src_xy), d2d.protection_radius(params, plan))
    elif mode == "faded":
        radii = (_FADING_H_MAX * src_pow / params.gamma_sense) ** (1.0 / alpha)
    else:
        raise ValueError(f"unknown sensing mode {mode!r}")

    if torus:
        radii = np.minimum(radii, _torus_cap(side))
        tree = cKDTree(wrap(realization.d2d_tx_xy, side), boxsize=side)
        hits = tree.query_ball_point(wrap(src_xy, side), radii, workers=1)
    else:
        tree = cKDTree(realization.d2d_tx_xy)
        hits = tree.query_ball_point(src_xy, radii, workers=1)
    counts = np.fromiter((len(h) for h in hits), dtype=np.int64, count=len(hits))
    if counts.sum() == 0:
        return free
    tag_flat = np.concatenate(hits).astype(np.int64)
    if mode == "meandisc":
        free[tag_flat] = False
        return free
    src_flat = np.repeat(np.arange(len(src_xy)), counts)
    r2 = flat_r2(src_xy[src_flat], realization.d2d_tx_xy[tag_flat], side, torus)
    h = rng.exponential(size=len(tag_flat))
    with np.errstate(divide="ignore"):
        busy = src_pow[src_flat] * h * r2 ** (-alpha / 2.0) > params.gamma_sense
    free[tag_flat[busy]] = False
    return free


def field_interference(
    rx_xy: np.ndarray,
    src_xy: np.ndarray,
    src_pow: np.ndarray,
    pl_exponent: float,
    budget: float,
    side: float,
    rng: np.random.Generator,
    torus: bool,
    exclude_self: np.ndarray | None = None,
) -> np.ndarray:
    """Faded power sum  a_i = sum_j P_j h_ij r_ij^-pl  at each receiver row.

    Sources beyond the radius where the *expected* omitted field drops
    under ``budget`` watts are skipped (budget <= 0 keeps everything up to
    the wrap-around limit).  ``exclude_self[i]`` names a source row that
    belongs to receiver ``i`` and never contributes.
    """
    n_rx = len(rx_xy)
    out = np.zeros(n_rx)
    n_src = len(src_xy)
    if n_rx == 0 or n_src == 0:
        return out
    if exclude_self is not None and len(exclude_self) != n_rx:
        raise ValueError("exclude_self must have one entry per receiver")

    radius = math.inf
    if budget > 0.0:
        mean_total = float(np.sum(src_pow))
        radius = (
            2.0 * math.pi * mean_total / ((pl_exponent - 2.0) * side * side * budget)
        ) ** (1.0 / (pl_exponent - 2.0))
    if torus:
        radius = min(radius, _torus_cap(side))
        tree = cKDTree(wrap(src_xy, side), boxsize=side)
        hits = tree.query_ball_point(wrap(rx_xy, side), radius, workers=1)
    else:
        radius = min(radius, math.sqrt(2.0) * side)
        tree = cKDTree(src_xy)
        hits = tree.query_ball_point(rx_xy, radius, workers=1)
    counts = np.fromiter((len(h) for h in hits), dtype=np.int64, count=n_rx)
    if counts.sum() == 0:
        return out
    src_flat = np.concatenate(hits).astype(np.int64)
    rx_flat = np.repeat(np.arange(n_rx), counts)
    if exclude_self is not None:
        keep = src_flat != exclude_self[rx_flat]
        src_flat, rx_flat = src_flat[keep], rx_flat[keep]
    if len(src_flat) == 0:
        return out
    r2 = flat_r2(rx_xy[rx_flat], src_xy[src_flat], side, torus)
    h = rng.exponential(size=len(src_flat))
    with np.errstate(divide="ignore"):
        contrib = src_pow[src_flat] * h * r2 ** (-pl_exponent / 2.0)
    np.add.at(out, rx_flat, contrib)
    return out


def _interference_budget(params: NetworkParams, tail_frac: float) -> float:
    """Watts of expected omitted far field tolerated at a tagged receiver."""
    if tail_frac <= 0.0:
        return 0.0
    return tail_frac * (params.sigma_z2 + params.rho_d / max(params.tau, 1.0))


def d2d_link_outage(
    realization: Realization,
    schedule: Schedule,
    params: NetworkParams,
    plan: ChannelPlan,
    rng: np.random.Generator,
    tagged: np.ndarray,
    active: np.ndarray,
    measured: np.ndarray,
    torus: bool = True,
    tail_frac: float = 0.002,
) -> tuple[int, int, int, int]:
    """(number of tagged measured links, SINR failures among them).

    ``tagged`` selects which pairs are probed (e.g. the sensed-free ones
    for the typical-link outage, whose energy state is treated as
    independent of the interference field); ``active`` selects which
    transmitters actually interfere.  Cellular shared-channel sources are
    summed exactly, D2D sources via the truncated sum; a tagged pair that
    is itself active never interferes with its own receiver.

    Returns (probes, probe failures, active probes, active-probe
    failures): the first pair estimates the typical-link outage, the
    second the outage of the links that actually transmit.
    """
    act_idx = np.nonzero(active)[0]
    probes = np.nonzero(tagged & measured)[0]
    n_tagged = len(probes)
    if n_tagged == 0:
        return 0, 0, 0, 0
    side = realization.window_side
    rx = realization.d2d_rx_xy[probes]
    budget = _interference_budget(params, tail_frac)

    # shared-channel cellular sources are few: a dense exact sum beats the
    # truncated tree pairing
    interference = np.zeros(n_tagged)
    cell_xy, cell_pow = _cd_sources(realization, schedule, params, plan)
    if len(cell_xy) > 0:
        for lo in range(0, n_tagged, _CHUNK):
            hi = min(lo + _CHUNK, n_tagged)
            r2 = pair_r2(rx[lo:hi], cell_xy, side, torus)
            h = rng.exponential(size=r2.shape)
            with np.errstate(divide="ignore"):
                interference[lo:hi] += np.einsum(
                    "j,ij,ij->i", cell_pow, h, r2 ** (-params.alpha / 2.0)
                )
    # row of each probe's own transmitter in act_idx, -1 when inactive
    own = np.searchsorted(act_idx, probes)
    own_valid = active[probes]
    own = np.where(own_valid, np.minimum(own, max(len(act_idx) - 1, 0)), -1)
    p_tx = params.rho_d * params.d_o**params.beta
    interference += field_interference(
        rx,
        realization.d2d_tx_xy[act_idx],
        np.full(len(act_idx), p_tx),
        params.beta,
        budget,
        side,
        rng,
        torus,
        exclude_self=own,
    )
    h0 = rng.exponential(size=n_tagged)
    failures = params.rho_d * h0 < params.tau * (interference + params.sigma_z2)
    act_probe = active[probes]
    return (
        n_tagged,
        int(np.count_nonzero(failures)),
        int(np.count_nonzero(act_probe)),
        int(np.count_nonzero(failures & act_probe)),
    )


@dataclass
class ChannelClassOutcome:
    served_total: int  # grants of this class over all its channels
    tagged: int        # measured grants on the representative channel
    failures: int      # SINR failures among the tagged grants


def cellular_class_outcomes(
    realization: Realization,
    schedule: Schedule,
    params: NetworkParams,
    plan: ChannelPlan,
    rng: np.random.Generator,
    act_tx_xy: np.ndarray,
    torus: bool = True,
    tail_frac: float = 0.002,
    user_measured: np.ndarray | None = None,
    bs_measured: np.ndarray | None = None,
    max_tagged: int = 0,
) -> dict[str, ChannelClassOutcome]:
    """Cellular SINR outcomes per channel class.

    Channels split into three exchangeable classes — the D2D channel,
    other downlink, other uplink — so one representative channel per class
    is evaluated and weighted by the class's total grant count.
    ``max_tagged`` > 0 probes at most that many grants per class (uniform
    subsample).
    """
    n_ch = plan.n_total
    cd = plan.cd_index
    side = realization.window_side
    ch_counts = np.bincount(schedule.served_channel, minlength=n_ch)

    reps: dict[str, int | None] = {"cd": cd, "dl_other": None, "ul_other": None}
    dl_others = [c for c in range(plan.n_downlink) if c != cd]
    ul_others = [c for c in range(plan.n_downlink, n_ch) if c != cd]
    if dl_others:
        reps["dl_other"] = dl_others[0]
    if ul_others:
        reps["ul_other"] = ul_others[0]
    totals = {
        "cd": int(ch_counts[cd]),
        "dl_other": int(ch_counts[dl_others].sum()) if dl_others else 0,
        "ul_other": int(ch_counts[ul_others].sum()) if ul_others else 0,
    }

    out: dict[str, ChannelClassOutcome] = {}
    for name, ch in reps.items():
        if ch is None:
            out[name] = ChannelClassOutcome(totals[name], 0, 0)
            continue
        sel = np.nonzero(schedule.served_channel == ch)[0]
        downlink = ch < plan.n_downlink
        users_t = schedule.served_users[sel]
        bs_t = schedule.serving_bs[users_t]
        if max_tagged > 0 and len(sel) > max_tagged:
            pick = np.sort(rng.choice(len(sel), size=max_tagged, replace=False))
            sel, users_t, bs_t = sel[pick], users_t[pick], bs_t[pick]
        if downlink:
            if user_measured is not None:
                keep = user_measured[users_t]
                sel, users_t, bs_t = sel[keep], users_t[keep], bs_t[keep]
            tagged_xy = realization.user_xy[users_t]
            src_idx = np.nonzero(schedule.bs_channel_active[:, ch])[0]
            src_xy = realization.bs_xy[src_idx]
            src_pow = np.full(len(src_idx), params.p_b)
            own_col = np.searchsorted(src_idx, bs_t)
            link_dist = schedule.serving_dist[users_t]
            with np.errstate(divide="ignore"):
                signal_mean = params.p_b * link_dist ** (-params.alpha)
        else:
            if bs_measured is not None:
                keep = bs_measured[bs_t]
                sel, users_t, bs_t = sel[keep], users_t[keep], bs_t[keep]
            tagged_xy = realization.bs_xy[bs_t]
            src_all = np.nonzero(schedule.served_channel == ch)[0]
            src_xy = realization.user_xy[schedule.served_users[src_all]]
            src_pow = schedule.served_ul_power[src_all]
            own_col = np.searchsorted(src_all, sel)
            signal_mean = np.full(len(sel), params.rho_b)

        n_tagged = len(sel)
        if n_tagged == 0:
            out[name] = ChannelClassOutcome(totals[name], 0, 0)
            continue
        interference = np.zeros(n_tagged)
        if len(src_xy) > 0:
            for lo in range(0, n_tagged, _CHUNK):
                hi = min(lo + _CHUNK, n_tagged)
                r2 = pair_r2(tagged_xy[lo:hi], src_xy, side, torus)
                h = rng.exponential(size=r2.shape)
                with np.errstate(divide="ignore", invalid="ignore"):
                    contrib = src_pow[None, :] * h * r2 ** (-params.alpha / 2.0)
                rows = np.arange(lo, hi)
                contrib[rows - lo, own_col[rows]] = 0.0  # own link is the signal
                interference[lo:hi] += np.nansum(contrib, axis=1)
        if ch == cd and len(act_tx_xy) > 0:
            p_tx = params.rho_d * params.d_o**params.beta
            interference += field_interference(
                tagged_xy,
                act_tx_xy,
                np.full(len(act_tx_xy), p_tx),
                params.beta,
                _interference_budget(params, tail_frac),
                side,
                rng,
                torus,
            )
        h0 = rng.exponential(size=n_tagged)
        failures = signal_mean * h0 < params.tau * (interference + params.sigma_z2)
        out[name] = ChannelClassOutcome(
            totals[name], n_tagged, int(np.count_nonzero(failures))
        )
    return out
