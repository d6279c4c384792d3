"""Cell-load distribution and per-channel spectrum-access probabilities.

The number of users served by a base station follows a negative-binomial
law obtained by mixing Poisson user counts over gamma-distributed cell
areas (shape 3.575, the standard Voronoi-area fit).  Everything downstream
— channel availability for cellular users and the access probability of
each channel under both policies — is an expectation against this pmf.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .params import Policy

# Gamma shape of the normalized Voronoi cell area.  A fit constant, not a
# tuning knob.
SHAPE_B = 3.575


@dataclass(frozen=True)
class CellLoadDist:
    """Distribution of the number of users associated with one base station.

    ``n_max`` truncates the support; the default covers more than 15
    standard deviations of the tail so the truncated pmf sums to 1 within
    1e-9 for any practical load.
    """

    mean_load: float
    shape_b: float = SHAPE_B
    n_max: int = 0  # 0 = choose automatically

    def __post_init__(self):
        if self.mean_load < 0.0:
            raise ValueError("mean_load must be nonnegative")
        if self.shape_b <= 0.0:
            raise ValueError("shape_b must be positive")
        if self.n_max <= 0:
            b = self.shape_b
            m = self.mean_load
            auto = int(math.ceil(m + 50.0 * math.sqrt(m * (1.0 + m / b)))) if m > 0 else 1
            object.__setattr__(self, "n_max", max(1000, auto))

    @property
    def zeta(self) -> float:
        """Normalizing constant b^b / gamma(b)."""
        b = self.shape_b
        return math.exp(b * math.log(b) - math.lgamma(b))

    @cached_property
    def pmf(self) -> np.ndarray:
        """P{N = n} for n = 0..n_max, computed recursively in log space."""
        b = self.shape_b
        m = self.mean_load
        if m == 0.0:
            out = np.zeros(self.n_max + 1)
            out[0] = 1.0
            return out
        log_p = np.empty(self.n_max + 1)
        log_p[0] = b * (math.log(b) - math.log(b + m))
        n = np.arange(self.n_max)
        step = np.log(n + b) - np.log(n + 1.0) + math.log(m) - math.log(b + m)
        log_p[1:] = log_p[0] + np.cumsum(step)
        return np.exp(log_p)

    def mean(self) -> float:
        return float(np.arange(self.n_max + 1) @ self.pmf)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw loads via the gamma-Poisson mixture (sampling oracle)."""
        if self.mean_load == 0.0:
            return np.zeros(size, dtype=np.int64)
        areas = rng.gamma(self.shape_b, self.mean_load / self.shape_b, size)
        return rng.poisson(areas)


@dataclass(frozen=True)
class AccessProbs:
    """Access probabilities for one policy and channel-set size.

    q_f: a cellular user is assigned some channel by its serving station.
    q_c: a station uses a given non-D2D channel.
    q_d: a station uses the D2D channel.
    """

    q_f: float
    q_c: float
    q_d: float
    policy: Policy
    n_channels: int

    def __post_init__(self):
        for name in ("q_f", "q_c", "q_d"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 1]")
            object.__setattr__(self, name, min(max(v, 0.0), 1.0))


def cell_load_pmf(dist: CellLoadDist, n: int) -> float:
    """P{N = n}; zero beyond the truncation point."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > dist.n_max:
        return 0.0
    return float(dist.pmf[n])


def q_f(dist: CellLoadDist, n_channels: int) -> float:
    """Probability that a user is assigned a channel by its serving station.

    Stations serve min(N, C) of their N users, so a user is turned away
    with probability (N - C)/N when N > C.  Policy-independent.
    """
    if n_channels < 1:
        raise ValueError("n_channels must be >= 1")
    p = dist.pmf
    if n_channels + 1 > dist.n_max:
        return 1.0
    n = np.arange(n_channels + 1, dist.n_max + 1)
    return float(1.0 - np.sum((n - n_channels) / n * p[n_channels + 1 :]))


def q_c_rsa(dist: CellLoadDist, n_channels: int) -> float:
    """Probability a station uses a given channel under random access.

    Equals E[min(N, C)] / C; the same value applies to the D2D channel.
    """
    if n_channels < 1:
        raise ValueError("n_channels must be >= 1")
    c = n_channels
    k = min(c, dist.n_max + 1)
    n = np.arange(k)
    return float(1.0 - np.sum((c - n) / c * dist.pmf[:k]))


def q_psa(dist: CellLoadDist, n_channels: int) -> tuple[float, float]:
    """(q_c, q_d) under prioritized access.

    Non-D2D channels absorb up to C-1 users; the D2D channel is used only
    on overflow, i.e. q_d = P{N >= C}.
    """
    if n_channels < 2:
        raise ValueError("prioritized access needs n_channels >= 2")
    c = n_channels
    k = min(c, dist.n_max + 1)
    n = np.arange(k)
    head = dist.pmf[:k]
    qc = float(1.0 - np.sum((c - n - 1.0) / (c - 1.0) * head))
    qd = float(1.0 - np.sum(head))
    return qc, max(qd, 0.0)


def access_probs(dist: CellLoadDist, n_channels: int, policy: Policy) -> AccessProbs:
    """Bundle q_f, q_c, q_d for the given policy."""
    qf = q_f(dist, n_channels)
    if policy is Policy.RSA:
        qc = q_c_rsa(dist, n_channels)
        qd = qc
    else:
        qc, qd = q_psa(dist, n_channels)
    return AccessProbs(qf, qc, qd, policy, n_channels)
