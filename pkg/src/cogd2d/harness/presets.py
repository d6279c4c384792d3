"""Canned experiment presets (fig3..fig8), one per reference figure.

Shared baseline: station power 37 dBm, station sensitivity -70 dBm, noise
-104 dBm, 1 station/km^2, 10 users per station, 20 D2D transmitters/km^2,
alpha 4, beta 3, 10 channels, d_o 10 m, tau 0 dB, sensing threshold -60
dBm, D2D sensitivity -70 dBm.  Each preset overrides what its sweep
needs.  The uplink half of the channel set defaults to floor(C/2).

fig6 note: its companion text quotes channel-count thresholds (outage
below 0.3 from 11 channels under prioritized access, from 25 under random
access) that are reproduced with a sensing threshold of -70 dBm, not the
-60 dBm the figure caption lists; this preset uses -70 dBm.
"""

from dataclasses import dataclass, replace

from .config import ExperimentConfig


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    sweep_var: str
    headline: tuple[str, ...]  # CSV columns a figure of this preset shows
    log_x: bool
    config: ExperimentConfig


def _log_grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    step = (hi / lo) ** (1.0 / (n - 1))
    return tuple(lo * step**i for i in range(n))


def _lin_grid(lo: float, hi: float, step: float) -> tuple[float, ...]:
    out = []
    v = lo
    while v <= hi + 1e-9:
        out.append(round(v, 9))
        v += step
    return tuple(out)


_BASE = ExperimentConfig()

PRESETS: dict[str, Preset] = {
    "fig3": Preset(
        "fig3",
        "D2D transmission probability vs station density, four access scenarios",
        "lambda_b_per_km2",
        ("p_t",),
        log_x=True,
        config=replace(
            _BASE,
            rho_d_dbm=-80.0,
            sweep_var="lambda_b_per_km2",
            sweep_values=_log_grid(0.1, 10.0, 21),
        ),
    ),
    "fig4": Preset(
        "fig4",
        "Harvesting / free-channel / transmission probability vs station density "
        "(downlink D2D channel, prioritized access)",
        "lambda_b_per_km2",
        ("p_s", "p_f", "p_t"),
        log_x=True,
        config=replace(
            _BASE,
            rho_d_dbm=-80.0,
            policies=("psa",),
            cd_sides=("dl",),
            sweep_var="lambda_b_per_km2",
            sweep_values=_log_grid(0.1, 10.0, 21),
        ),
    ),
    "fig5": Preset(
        "fig5",
        "D2D SINR outage vs sensing threshold, 15 channels",
        "gamma_dbm",
        ("O_D",),
        log_x=False,
        config=replace(
            _BASE,
            n_channels=15,
            rho_d_dbm=-70.0,
            sweep_var="gamma_dbm",
            sweep_values=_lin_grid(-90.0, -40.0, 2.0),
        ),
    ),
    "fig6": Preset(
        "fig6",
        "D2D SINR outage vs number of channels",
        "n_channels",
        ("O_D",),
        log_x=False,
        config=replace(
            _BASE,
            gamma_dbm=-70.0,
            rho_d_dbm=-70.0,
            sweep_var="n_channels",
            sweep_values=tuple(float(c) for c in range(2, 31)),
        ),
    ),
    "fig7": Preset(
        "fig7",
        "Overall D2D outage vs receiver sensitivity, 5 users per station",
        "rho_d_dbm",
        ("O_D_tot",),
        log_x=False,
        config=replace(
            _BASE,
            lambda_u_ratio=5.0,
            sweep_var="rho_d_dbm",
            sweep_values=_lin_grid(-100.0, -40.0, 2.0),
        ),
    ),
    "fig8": Preset(
        "fig8",
        "Average cellular SINR outage vs number of channels, random access, "
        "no-D2D / non-cognitive / cognitive D2D",
        "n_channels",
        ("O_B_avg",),
        log_x=False,
        config=replace(
            _BASE,
            rho_d_dbm=-60.0,
            beta=4.0,
            d_o_m=15.0,
            policies=("rsa",),
            d2d_modes=("nod2d", "noncognitive", "cognitive"),
            sweep_var="n_channels",
            sweep_values=tuple(float(c) for c in range(5, 31)),
        ),
    ),
}


def list_presets() -> list[Preset]:
    return list(PRESETS.values())


def get_preset_config(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name].config
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
