"""Network-wide parameter records shared by the analytic and Monte Carlo engines.

All quantities are SI: densities in m^-2, powers in watts, distances in
meters, SINR threshold as a linear ratio.
"""

from dataclasses import dataclass, replace
from enum import Enum


class Policy(str, Enum):
    """Spectrum access policy used by every base station."""

    RSA = "rsa"  # any channel, uniformly at random
    PSA = "psa"  # D2D channel assigned only when all others are taken


class Side(str, Enum):
    """Which half of the channel plan an entity belongs to."""

    DOWNLINK = "dl"
    UPLINK = "ul"


@dataclass(frozen=True)
class NetworkParams:
    """Physical and geometric scalars of the network.

    Attributes:
        lambda_b: base-station density (m^-2).
        lambda_u: cellular-user density (m^-2).
        lambda_d: D2D-transmitter density (m^-2).
        p_b: base-station transmit power (W).
        rho_b: base-station receiver sensitivity (W); uplink users invert
            the channel so the mean received power equals this.
        rho_d: D2D receiver sensitivity (W).
        sigma_z2: noise power (W).
        a: RF-to-DC conversion efficiency in (0, 1].
        alpha: path-loss exponent of cellular links (> 2).
        beta: path-loss exponent of D2D links (> 2).
        gamma_sense: spectrum-sensing threshold (W).
        d_o: D2D transmitter-receiver distance (m); receivers sit exactly
            at this worst-case distance.
        tau: SINR outage threshold (linear).
    """

    lambda_b: float
    lambda_u: float
    lambda_d: float
    p_b: float
    rho_b: float
    rho_d: float
    sigma_z2: float
    gamma_sense: float
    d_o: float
    tau: float
    a: float = 1.0
    alpha: float = 4.0
    beta: float = 3.0

    def __post_init__(self):
        if self.lambda_b <= 0.0:
            raise ValueError("lambda_b must be positive")
        if self.lambda_u < 0.0 or self.lambda_d < 0.0:
            raise ValueError("user and D2D densities must be nonnegative")
        for name in ("p_b", "rho_b", "rho_d", "gamma_sense", "d_o"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.sigma_z2 < 0.0:
            raise ValueError("sigma_z2 must be nonnegative")
        if not 0.0 < self.a <= 1.0:
            raise ValueError("conversion efficiency a must be in (0, 1]")
        if self.alpha <= 2.0 or self.beta <= 2.0:
            raise ValueError("path-loss exponents must exceed 2")
        if self.tau < 0.0:
            raise ValueError("tau must be nonnegative")

    @property
    def mean_load(self) -> float:
        """Average number of cellular users per base station."""
        return self.lambda_u / self.lambda_b

    def with_(self, **changes) -> "NetworkParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelPlan:
    """Partition of the channel set and placement of the D2D channel.

    ``n_downlink`` channels carry base-station transmissions and
    ``n_uplink`` channels carry user transmissions.  Exactly one channel,
    on the side named by ``d2d_side``, is shared with D2D links.
    """

    n_downlink: int
    n_uplink: int
    d2d_side: Side
    policy: Policy

    def __post_init__(self):
        if self.n_downlink < 0 or self.n_uplink < 0:
            raise ValueError("channel counts must be nonnegative")
        if self.n_total < 1:
            raise ValueError("need at least one channel")
        if self.n_cd_side < 1:
            raise ValueError("the side holding the D2D channel needs >= 1 channel")
        if self.policy is Policy.PSA and self.n_total < 2:
            raise ValueError("prioritized access needs a non-D2D channel pool")

    @property
    def n_total(self) -> int:
        return self.n_downlink + self.n_uplink

    @property
    def n_cd_side(self) -> int:
        return self.n_downlink if self.d2d_side is Side.DOWNLINK else self.n_uplink

    @property
    def cd_index(self) -> int:
        """Index of the D2D channel; downlink channels occupy [0, n_downlink)."""
        return 0 if self.d2d_side is Side.DOWNLINK else self.n_downlink

    def side_of(self, channel: int) -> Side:
        if not 0 <= channel < self.n_total:
            raise ValueError("channel index out of range")
        return Side.DOWNLINK if channel < self.n_downlink else Side.UPLINK

    @staticmethod
    def even_split(n_channels: int, d2d_side: Side, policy: Policy) -> "ChannelPlan":
        """Default split: uplink gets floor(n/2), downlink the rest."""
        n_ul = n_channels // 2
        return ChannelPlan(n_channels - n_ul, n_ul, d2d_side, policy)
