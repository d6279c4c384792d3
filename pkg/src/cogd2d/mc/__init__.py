"""Monte Carlo engine: samples full network snapshots and estimates every
metric the analytic modules predict, without their point-process
approximations."""

from .engine import Estimate, McMetrics, McSettings, estimate_metrics
from .realization import Realization, sample_realization
from .schedule import Schedule, associate_and_schedule
from .measure import channel_free_all, harvested_power, harvested_power_all, sense_channel

__all__ = [
    "Estimate",
    "McMetrics",
    "McSettings",
    "Realization",
    "Schedule",
    "associate_and_schedule",
    "channel_free_all",
    "estimate_metrics",
    "harvested_power",
    "harvested_power_all",
    "sample_realization",
    "sense_channel",
]
