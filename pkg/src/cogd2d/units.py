"""Unit conversions between human-facing units and SI."""

import math


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0.0:
        raise ValueError("ratio must be positive to express in dB")
    return 10.0 * math.log10(x)


def per_km2_to_per_m2(density: float) -> float:
    return density * 1e-6


def per_m2_to_per_km2(density: float) -> float:
    return density * 1e6
