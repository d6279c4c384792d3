"""cogd2d: outage analysis for cognitive, RF-energy-harvesting D2D links
underlaying a multi-channel cellular network.

Two engines compute the same metrics: closed-form expressions
(:mod:`cogd2d.spectrum`, :mod:`cogd2d.d2d`, :mod:`cogd2d.cellular`) and a
Monte Carlo simulator (:mod:`cogd2d.mc`) that keeps none of their
point-process approximations.  :mod:`cogd2d.harness` drives parameter
sweeps and writes CSV files plus optional figures.
"""

from . import cellular, d2d, mc, specfun, spectrum, units
from .params import ChannelPlan, NetworkParams, Policy, Side

__version__ = "0.1.0"

__all__ = [
    "ChannelPlan",
    "NetworkParams",
    "Policy",
    "Side",
    "cellular",
    "d2d",
    "mc",
    "specfun",
    "spectrum",
    "units",
]
