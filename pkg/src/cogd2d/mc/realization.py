"""Sampling of one network snapshot."""

import math
from dataclasses import dataclass

import numpy as np

from ..params import NetworkParams


@dataclass
class Realization:
    """One sampled snapshot: independent Poisson point sets in a square
    window, plus a receiver placed exactly d_o from each D2D transmitter
    in a uniformly random direction (receiver coordinates may fall outside
    the window; the wrap-around metric absorbs that)."""

    window_side: float
    bs_xy: np.ndarray
    user_xy: np.ndarray
    d2d_tx_xy: np.ndarray
    d2d_rx_xy: np.ndarray


def sample_realization(params: NetworkParams, window_side: float, seed) -> Realization:
    """Draw a snapshot; identical seeds give bit-identical snapshots.

    ``seed`` may be anything ``numpy.random.default_rng`` accepts.
    """
    if window_side <= 0.0:
        raise ValueError("window_side must be positive")
    rng = np.random.default_rng(seed)
    area = window_side * window_side

    def ppp(density: float) -> np.ndarray:
        n = rng.poisson(density * area)
        return rng.uniform(0.0, window_side, size=(n, 2))

    bs_xy = ppp(params.lambda_b)
    user_xy = ppp(params.lambda_u)
    tx_xy = ppp(params.lambda_d)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=len(tx_xy))
    offsets = params.d_o * np.column_stack([np.cos(angles), np.sin(angles)])
    return Realization(window_side, bs_xy, user_xy, tx_xy, tx_xy + offsets)
