"""Nearest-station association and per-cell channel assignment.

Every user attaches to its closest base station; a station with N users
picks min(N, C) of them uniformly at random and gives each one channel.
Under random access the channels are a uniform subset of the whole pool;
under prioritized access they are drawn from the pool minus the D2D
channel, which is granted only to the overflow user when N >= C.  Uplink
grants carry the power-controlled transmit power rho_b * r^alpha.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..params import ChannelPlan, NetworkParams, Policy
from .geometry import wrap
from .realization import Realization


@dataclass
class Schedule:
    plan: ChannelPlan
    serving_bs: np.ndarray      # (n_users,) station index, -1 if none
    serving_dist: np.ndarray    # (n_users,) distance to the serving station
    load: np.ndarray            # (n_bs,) attached-user counts
    served_users: np.ndarray    # (k,) indices into the user set
    served_channel: np.ndarray  # (k,)
    bs_channel_active: np.ndarray  # (n_bs, C) bool
    served_ul_power: np.ndarray    # (k,) watts; zero on downlink grants

    @property
    def served_bs(self) -> np.ndarray:
        return self.serving_bs[self.served_users]

    @property
    def served_dist(self) -> np.ndarray:
        return self.serving_dist[self.served_users]


def _empty_schedule(plan: ChannelPlan, n_bs: int, n_users: int) -> Schedule:
    return Schedule(
        plan=plan,
        serving_bs=np.full(n_users, -1, dtype=np.int64),
        serving_dist=np.full(n_users, np.inf),
        load=np.zeros(n_bs, dtype=np.int64),
        served_users=np.zeros(0, dtype=np.int64),
        served_channel=np.zeros(0, dtype=np.int64),
        bs_channel_active=np.zeros((n_bs, plan.n_total), dtype=bool),
        served_ul_power=np.zeros(0),
    )


def associate_and_schedule(
    realization: Realization,
    params: NetworkParams,
    plan: ChannelPlan,
    seed,
    torus: bool = True,
    full_load: bool = False,
) -> Schedule:
    """Assign users to stations and channels for one snapshot.

    ``full_load`` is a saturation probe: every station transmits on every
    channel and every user is tagged on a uniformly random channel.  It
    deliberately ignores the one-user-per-channel rule (downlink
    calibration against the classical saturated-network outage).
    """
    rng = np.random.default_rng(seed)
    n_bs = len(realization.bs_xy)
    n_users = len(realization.user_xy)
    n_ch = plan.n_total
    if n_bs == 0 or n_users == 0:
        sched = _empty_schedule(plan, n_bs, n_users)
        if full_load and n_bs > 0:
            sched.bs_channel_active[:] = True
        return sched

    side = realization.window_side
    if torus:
        tree = cKDTree(wrap(realization.bs_xy, side), boxsize=side)
        dist, serving = tree.query(wrap(realization.user_xy, side), workers=1)
    else:
        tree = cKDTree(realization.bs_xy)
        dist, serving = tree.query(realization.user_xy, workers=1)
    serving = serving.astype(np.int64)
    load = np.bincount(serving, minlength=n_bs)

    if full_load:
        served_users = np.arange(n_users, dtype=np.int64)
        served_channel = rng.integers(0, n_ch, size=n_users)
        active = np.ones((n_bs, n_ch), dtype=bool)
    else:
        cap = np.minimum(load, n_ch)
        if plan.policy is Policy.RSA:
            seq = np.argsort(rng.random((n_bs, n_ch)), axis=1)
        else:
            non_cd = np.delete(np.arange(n_ch), plan.cd_index)
            seq_small = non_cd[np.argsort(rng.random((n_bs, n_ch - 1)), axis=1)]

        # rank users within their cell by a random priority; the first
        # cap(b) of each cell are served
        order = np.lexsort((rng.random(n_users), serving))
        starts = np.zeros(n_bs + 1, dtype=np.int64)
        starts[1:] = np.cumsum(load)
        rank = np.arange(n_users) - starts[serving[order]]
        sel = rank < cap[serving[order]]
        served_users = order[sel]
        j = rank[sel]
        b = serving[served_users]
        if plan.policy is Policy.RSA:
            served_channel = seq[b, j]
        else:
            # overflow user (rank C-1, only present when load >= C) gets c_d
            served_channel = np.where(
                j < n_ch - 1, seq_small[b, np.minimum(j, n_ch - 2)], plan.cd_index
            )
        active = np.zeros((n_bs, n_ch), dtype=bool)
        active[b, served_channel] = True

    ul_power = np.zeros(len(served_users))
    is_ul = served_channel >= plan.n_downlink
    ul_dist = dist[served_users[is_ul]]
    ul_power[is_ul] = params.rho_b * ul_dist**params.alpha

    return Schedule(
        plan=plan,
        serving_bs=serving,
        serving_dist=dist,
        load=load.astype(np.int64),
        served_users=served_users.astype(np.int64),
        served_channel=served_channel.astype(np.int64),
        bs_channel_active=active,
        served_ul_power=ul_power,
    )
