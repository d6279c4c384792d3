"""Distance helpers for square windows with wrap-around or plain metric."""

import numpy as np


def wrap(points: np.ndarray, side: float) -> np.ndarray:
    """Map coordinates into [0, side); KD-trees with a box need this."""
    return np.mod(points, side)


def pair_r2(a: np.ndarray, b: np.ndarray, side: float, torus: bool) -> np.ndarray:
    """Squared distances between every row of ``a`` (n,2) and ``b`` (m,2)."""
    d0 = a[:, 0][:, None] - b[None, :, 0]
    d1 = a[:, 1][:, None] - b[None, :, 1]
    if torus:
        half = 0.5 * side
        d0 = np.abs((d0 + half) % side - half)
        d1 = np.abs((d1 + half) % side - half)
    d0 *= d0
    d1 *= d1
    d0 += d1
    return d0


def flat_r2(a: np.ndarray, b: np.ndarray, side: float, torus: bool) -> np.ndarray:
    """Squared distances between aligned rows of ``a`` and ``b`` (k,2)."""
    d = a - b
    if torus:
        half = 0.5 * side
        d = np.abs((d + half) % side - half)
    return np.einsum("ij,ij->i", d, d)
