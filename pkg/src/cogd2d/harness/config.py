"""Experiment configuration in human units, with a sectioned key=value file.

The config stores powers in dBm, densities per km^2, distances in meters
and the SINR threshold in dB; conversion to SI happens only when a
parameter record is built, so emit -> parse round-trips are exact.
"""

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..params import ChannelPlan, NetworkParams, Policy, Side
from ..units import db_to_linear, dbm_to_watts, per_km2_to_per_m2

SWEEPABLE = (
    "lambda_b_per_km2",
    "lambda_u_per_km2",
    "lambda_d_per_km2",
    "gamma_dbm",
    "rho_d_dbm",
    "rho_b_dbm",
    "tau_db",
    "d_o_m",
    "n_channels",
)

D2D_MODES = ("cognitive", "noncognitive", "nod2d")


@dataclass(frozen=True)
class ExperimentConfig:
    # network
    p_b_dbm: float = 37.0
    rho_b_dbm: float = -70.0
    rho_d_dbm: float = -70.0
    sigma_z2_dbm: float = -104.0
    gamma_dbm: float = -60.0
    lambda_b_per_km2: float = 1.0
    lambda_u_ratio: float = 10.0   # users per station; ignored if absolute set
    lambda_u_per_km2: float = -1.0  # < 0 means "use the ratio"
    lambda_d_per_km2: float = 20.0
    alpha: float = 4.0
    beta: float = 3.0
    conversion_efficiency: float = 1.0
    d_o_m: float = 10.0
    tau_db: float = 0.0
    # channels / scenarios
    n_channels: int = 10
    n_uplink: int = -1  # < 0 means floor(n_channels / 2)
    policies: tuple[str, ...] = ("rsa", "psa")
    cd_sides: tuple[str, ...] = ("dl", "ul")
    d2d_modes: tuple[str, ...] = ("cognitive",)
    # sweep
    sweep_var: str = "lambda_b_per_km2"
    sweep_values: tuple[float, ...] = (1.0,)
    # engines / mc
    engines: str = "analytic"
    window_km: float = 20.0
    iterations: int = 10_000
    seed: int = 1
    sensing_mode: str = "faded"
    boundary: str = "torus"
    workers: int = 0  # 0 = all cores
    # output
    out_path: str = ""

    def __post_init__(self):
        if self.sweep_var not in SWEEPABLE:
            raise ValueError(f"sweep variable must be one of {SWEEPABLE}")
        vals = tuple(float(v) for v in self.sweep_values)
        if not vals:
            raise ValueError("sweep grid must be nonempty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        object.__setattr__(self, "sweep_values", vals)
        for p in self.policies:
            Policy(p)
        for s in self.cd_sides:
            Side(s)
        for m in self.d2d_modes:
            if m not in D2D_MODES:
                raise ValueError(f"unknown d2d mode {m!r}")
        if not self.policies or not self.cd_sides or not self.d2d_modes:
            raise ValueError("need at least one policy, side and d2d mode")
        if self.engines not in ("analytic", "mc", "both"):
            raise ValueError("engines must be analytic, mc or both")
        if self.sensing_mode not in ("faded", "meandisc"):
            raise ValueError("sensing_mode must be faded or meandisc")
        if self.boundary not in ("torus", "central"):
            raise ValueError("boundary must be torus or central")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")

    def at(self, value: float) -> "ExperimentConfig":
        """Bind the swept variable to one grid value."""
        if self.sweep_var == "n_channels":
            return replace(self, n_channels=int(round(value)))
        if self.sweep_var == "lambda_u_per_km2":
            return replace(self, lambda_u_per_km2=float(value))
        return replace(self, **{self.sweep_var: float(value)})

    def network_params(self, d2d_mode: str = "cognitive") -> NetworkParams:
        lam_b = per_km2_to_per_m2(self.lambda_b_per_km2)
        if self.lambda_u_per_km2 >= 0.0:
            lam_u = per_km2_to_per_m2(self.lambda_u_per_km2)
        else:
            lam_u = lam_b * self.lambda_u_ratio
        lam_d = 0.0 if d2d_mode == "nod2d" else per_km2_to_per_m2(self.lambda_d_per_km2)
        return NetworkParams(
            lambda_b=lam_b,
            lambda_u=lam_u,
            lambda_d=lam_d,
            p_b=dbm_to_watts(self.p_b_dbm),
            rho_b=dbm_to_watts(self.rho_b_dbm),
            rho_d=dbm_to_watts(self.rho_d_dbm),
            sigma_z2=dbm_to_watts(self.sigma_z2_dbm),
            gamma_sense=dbm_to_watts(self.gamma_dbm),
            d_o=self.d_o_m,
            tau=db_to_linear(self.tau_db),
            a=self.conversion_efficiency,
            alpha=self.alpha,
            beta=self.beta,
        )

    def channel_plan(self, side: Side, policy: Policy) -> ChannelPlan:
        if self.n_uplink >= 0:
            return ChannelPlan(self.n_channels - self.n_uplink, self.n_uplink, side, policy)
        return ChannelPlan.even_split(self.n_channels, side, policy)


_SECTIONS = {
    "network": (
        "p_b_dbm",
        "rho_b_dbm",
        "rho_d_dbm",
        "sigma_z2_dbm",
        "gamma_dbm",
        "lambda_b_per_km2",
        "lambda_u_ratio",
        "lambda_u_per_km2",
        "lambda_d_per_km2",
        "alpha",
        "beta",
        "conversion_efficiency",
        "d_o_m",
        "tau_db",
    ),
    "channels": ("n_channels", "n_uplink", "policies", "cd_sides", "d2d_modes"),
    "sweep": ("sweep_var", "sweep_values"),
    "mc": (
        "engines",
        "window_km",
        "iterations",
        "seed",
        "sensing_mode",
        "boundary",
        "workers",
    ),
    "output": ("out_path",),
}

_TUPLE_FIELDS = {"policies", "cd_sides", "d2d_modes", "sweep_values"}


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    cp = configparser.ConfigParser()
    for section, names in _SECTIONS.items():
        cp[section] = {}
        for name in names:
            value = getattr(config, name)
            if name in _TUPLE_FIELDS:
                cp[section][name] = ", ".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            else:
                cp[section][name] = repr(value) if isinstance(value, float) else str(value)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        cp.write(fh)


def load_config(path: str | Path) -> ExperimentConfig:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise FileNotFoundError(path)
    types = {
        f.name: (f.type if isinstance(f.type, str) else f.type.__name__)
        for f in fields(ExperimentConfig)
    }
    kwargs = {}
    for section, names in _SECTIONS.items():
        if section not in cp:
            continue
        for name in names:
            if name not in cp[section]:
                continue
            raw = cp[section][name].strip()
            if name == "sweep_values":
                kwargs[name] = tuple(float(v) for v in raw.split(",") if v.strip())
            elif name in _TUPLE_FIELDS:
                kwargs[name] = tuple(v.strip() for v in raw.split(",") if v.strip())
            elif types[name] == "int":
                kwargs[name] = int(raw)
            elif types[name] == "float":
                kwargs[name] = float(raw)
            else:
                kwargs[name] = raw
    return ExperimentConfig(**kwargs)
