"""Closed-form cellular-side SINR outage, per channel and averaged.

Valid only for the interference-limited regime with equal path-loss
exponents on cellular and D2D links; noise is forcibly ignored (a warning
is emitted when the parameter set carries nonzero noise power).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import spectrum
from .params import ChannelPlan, NetworkParams, Side
from .specfun import hyper_g


@dataclass(frozen=True)
class CellularMetrics:
    """Cellular outage bundle for one parameter point.

    ``outage_other`` is the usage-weighted outage over non-D2D channels
    (NaN when the plan has no such channel); ``outage_avg`` weights every
    channel by its access probability; ``outage_tot`` also counts blocking
    (no free channel) as outage.  ``cell_exponent``/``d2d_exponent`` are
    the D2D-channel interference exponents.
    """

    outage_cd: float
    outage_other: float
    outage_avg: float
    outage_tot: float
    cell_exponent: float
    d2d_exponent: float


def _exponents(
    params: NetworkParams, is_cd: bool, p_s: float, p_f: float, q_hat: float
) -> tuple[float, float]:
    alpha, beta, tau = params.alpha, params.beta, params.tau
    cell = (
        2.0
        * q_hat
        / (alpha - 2.0)
        * hyper_g(tau ** (-1.0 / alpha), alpha)
        * tau ** (2.0 / alpha)
    )
    d2d = 0.0
    if is_cd:
        d2d = (
            2.0
            * math.pi**2
            * p_s
            * p_f
            * params.lambda_d
            * params.d_o**2
            / (beta * math.sin(2.0 * math.pi / beta))
            * tau ** (2.0 / beta)
        )
    return cell, d2d


def sinr_outage(
    params: NetworkParams,
    plan: ChannelPlan,
    channel_side: Side,
    is_cd: bool,
    p_s: float,
    p_f: float,
    q_hat: float,
) -> float:
    """SINR outage for a user served on one channel.

    Downlink: signal from the nearest station, interference from other
    stations using the channel (density q_hat * lambda_b).  Uplink: the
    station receives a power-controlled signal, interference from users of
    other cells on the channel.  Active D2D transmitters add interference
    on the shared channel only.
    """
    if abs(params.alpha - params.beta) > 1e-12:
        raise ValueError("cellular outage is only available for alpha == beta")
    if not 0.0 <= q_hat <= 1.0:
        raise ValueError("q_hat must be in [0, 1]")
    if params.sigma_z2 > 0.0:
        warnings.warn(
            "cellular outage ignores noise (interference-limited form)",
            RuntimeWarning,
            stacklevel=2,
        )
    if params.tau == 0.0:
        return 0.0
    cell, d2d = _exponents(params, is_cd, p_s, p_f, q_hat)
    beta = params.beta
    if channel_side is Side.DOWNLINK:
        pl = math.pi * params.lambda_b
        return 1.0 - pl / (pl * (1.0 + cell) + (params.rho_d / params.p_b) ** (2.0 / beta) * d2d)
    return 1.0 - math.exp(-(cell + (params.rho_d / params.rho_b) ** (2.0 / beta) * d2d))


def avg_outage(weights, outages) -> float:
    """Average per-channel outages with weights proportional to channel use."""
    w = np.asarray(weights, dtype=float)
    o = np.asarray(outages, dtype=float)
    if w.shape != o.shape or w.size == 0:
        raise ValueError("weights and outages must be matching nonempty arrays")
    if np.any(w < 0.0):
        raise ValueError("weights must be nonnegative")
    total = w.sum()
    if total == 0.0:
        # nothing is ever transmitted; outage conditional on use is moot
        return 0.0
    return float(w @ o / total)


def total_outage(q_f: float, outage_avg: float) -> float:
    """Fold blocking into outage: unserved users count as outage."""
    if not 0.0 <= q_f <= 1.0 or not 0.0 <= outage_avg <= 1.0:
        raise ValueError("probabilities must be in [0, 1]")
    return 1.0 - q_f + q_f * outage_avg


def evaluate(
    params: NetworkParams,
    plan: ChannelPlan,
    p_s: float,
    p_f: float,
    dist: spectrum.CellLoadDist | None = None,
) -> CellularMetrics:
    """Per-channel, averaged, and overall cellular outage for one point.

    Channels of the same side and D2D-sharing status are exchangeable, so
    three evaluations cover the whole plan.
    """
    dist = dist or spectrum.CellLoadDist(params.mean_load)
    probs = spectrum.access_probs(dist, plan.n_total, plan.policy)

    o_cd = sinr_outage(params, plan, plan.d2d_side, True, p_s, p_f, probs.q_d)
    sides: list[tuple[float, float]] = [(probs.q_d, o_cd)]

    n_other_dl = plan.n_downlink - (1 if plan.d2d_side is Side.DOWNLINK else 0)
    n_other_ul = plan.n_uplink - (1 if plan.d2d_side is Side.UPLINK else 0)
    other_w: list[float] = []
    other_o: list[float] = []
    if n_other_dl > 0:
        o = sinr_outage(params, plan, Side.DOWNLINK, False, p_s, p_f, probs.q_c)
        sides.append((probs.q_c * n_other_dl, o))
        other_w.append(probs.q_c * n_other_dl)
        other_o.append(o)
    if n_other_ul > 0:
        o = sinr_outage(params, plan, Side.UPLINK, False, p_s, p_f, probs.q_c)
        sides.append((probs.q_c * n_other_ul, o))
        other_w.append(probs.q_c * n_other_ul)
        other_o.append(o)

    o_other = avg_outage(other_w, other_o) if other_w else math.nan
    o_avg = avg_outage([w for w, _ in sides], [o for _, o in sides])
    cell, d2d = _exponents(params, True, p_s, p_f, probs.q_d)
    return CellularMetrics(
        outage_cd=o_cd,
        outage_other=o_other,
        outage_avg=o_avg,
        outage_tot=total_outage(probs.q_f, o_avg),
        cell_exponent=cell,
        d2d_exponent=d2d,
    )
