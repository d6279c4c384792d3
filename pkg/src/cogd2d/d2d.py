"""Closed-form D2D-side metrics.

A D2D transmitter fires only when (i) it harvests enough ambient RF power
to invert the channel to its receiver and (ii) spectrum sensing finds the
shared channel free.  This module computes those two probabilities, the
resulting SINR outage at the receiver, the overall outage, and the
base-station density at which an uplink D2D channel starts beating a
downlink one.

The harvested power aggregated over all cellular transmissions has a
one-sided stable law; its scale constant (in W^(2/alpha)) is what the
``harvest_scale*`` functions return.  For alpha = 4 the law is Levy and
the sufficient-energy probability collapses to an error function;
otherwise it is evaluated by quadrature of the inversion integral.
"""

import math
from dataclasses import dataclass
from typing import Literal

from . import spectrum
from .params import ChannelPlan, NetworkParams, Policy, Side
from .specfun import QuadratureSpec, erf, hyper_g, integrate_to_infinity

# exp(-36) tail for the quadrature cutoff of the inversion integral
_ENVELOPE_LOG_TAIL = 36.0


@dataclass(frozen=True)
class D2DMetrics:
    """Analytic D2D-side outputs for one parameter point.

    ``p_t = p_s * p_f`` and ``harvest_scale = harvest_scale_dl +
    harvest_scale_ul`` hold exactly by construction.
    """

    p_s: float
    p_f: float
    p_t: float
    o_d: float
    o_d_tot: float
    harvest_scale_dl: float
    harvest_scale_ul: float
    harvest_scale: float
    sensing_exposure: float
    protection_radius_mean: float
    q_d: float


def protection_radius(params: NetworkParams, plan: ChannelPlan) -> float:
    """Mean radius of the sensing protection region around a D2D transmitter.

    Average of the random radius at which a faded cellular signal on the
    shared channel crosses the sensing threshold.  For an uplink D2D
    channel, power-controlled user transmit powers make the radius shrink
    as 1/sqrt(lambda_b).
    """
    alpha = params.alpha
    g1 = math.gamma((alpha + 1.0) / alpha)
    if plan.d2d_side is Side.DOWNLINK:
        return (params.p_b / params.gamma_sense) ** (1.0 / alpha) * g1
    return (
        (params.rho_b / params.gamma_sense) ** (1.0 / alpha)
        * g1
        / (2.0 * math.sqrt(params.lambda_b))
    )


def sensing_exposure(params: NetworkParams, plan: ChannelPlan) -> float:
    """Mean count of shared-channel transmitters inside the protection region
    at unit access probability; the free-channel probability is
    exp(-exposure * q_d).
    """
    alpha = params.alpha
    g2 = math.gamma((alpha + 2.0) / alpha)
    if plan.d2d_side is Side.DOWNLINK:
        return math.pi * params.lambda_b * (params.p_b / params.gamma_sense) ** (2.0 / alpha) * g2
    return (params.rho_b / params.gamma_sense) ** (2.0 / alpha) * g2


def p_free(params: NetworkParams, plan: ChannelPlan, q_d: float) -> float:
    """Probability the shared channel is sensed free by a D2D transmitter."""
    if not 0.0 <= q_d <= 1.0:
        raise ValueError("q_d must be in [0, 1]")
    return math.exp(-sensing_exposure(params, plan) * q_d)


def _subset_q_c(
    dist: spectrum.CellLoadDist,
    n_subset: int,
    policy: Policy,
    qc_formula: Literal["policy", "rsa"],
) -> float:
    """Per-channel access probability for one side of the plan.

    The prioritized-access formula needs at least two channels; a
    one-channel subset falls back to the random-access expression.
    """
    if n_subset == 0:
        return 0.0
    if qc_formula == "rsa" or policy is Policy.RSA or n_subset < 2:
        return spectrum.q_c_rsa(dist, n_subset)
    return spectrum.q_psa(dist, n_subset)[0]


def harvest_scales(
    params: NetworkParams,
    plan: ChannelPlan,
    dist: spectrum.CellLoadDist | None = None,
    qc_formula: Literal["policy", "rsa"] = "policy",
) -> tuple[float, float, float]:
    """Stable-law scale of the harvested power: (downlink, uplink, total).

    The downlink part sums over stations carrying up to n_downlink
    simultaneous transmissions; the uplink part treats transmitting users
    as a field of density q_c * n_uplink * lambda_b with power-controlled
    transmit powers.  Per-side access probabilities are evaluated on the
    side's own channel count.
    """
    alpha = params.alpha
    if alpha <= 2.0:
        raise ValueError("harvest scale requires alpha > 2")
    dist = dist or spectrum.CellLoadDist(params.mean_load)
    nu = (alpha - 2.0) / alpha

    scale_dl = 0.0
    if plan.n_downlink > 0:
        qc_dl = _subset_q_c(dist, plan.n_downlink, plan.policy, qc_formula)
        # sum_k Gamma(k - nu)/(k-1)! via the ratio recurrence
        term = math.gamma(1.0 - nu)
        total = term
        for k in range(1, plan.n_downlink):
            term *= (k - nu) / k
            total += term
        scale_dl = (
            2.0
            * math.pi
            * qc_dl
            * params.lambda_b
            * (params.a * params.p_b) ** (2.0 / alpha)
            * math.gamma(nu)
            / alpha
            * total
        )

    scale_ul = 0.0
    if plan.n_uplink > 0:
        qc_ul = _subset_q_c(dist, plan.n_uplink, plan.policy, qc_formula)
        scale_ul = (
            2.0
            * math.pi
            * qc_ul
            * plan.n_uplink
            * (params.a * params.rho_b) ** (2.0 / alpha)
            / (alpha * math.sin(2.0 * math.pi / alpha))
        )
    return scale_dl, scale_ul, scale_dl + scale_ul


def harvest_scale_quartic(
    params: NetworkParams,
    plan: ChannelPlan,
    dist: spectrum.CellLoadDist | None = None,
    qc_formula: Literal["policy", "rsa"] = "policy",
) -> float:
    """Closed form of the total harvest scale at alpha = 4.

    Independent of :func:`harvest_scales`; used as an algebraic
    cross-check (central binomial coefficients replace the gamma-ratio
    sum).
    """
    dist = dist or spectrum.CellLoadDist(params.mean_load)
    scale_dl = 0.0
    if plan.n_downlink > 0:
        qc_dl = _subset_q_c(dist, plan.n_downlink, plan.policy, qc_formula)
        s = sum(math.comb(2 * k, k) / 4.0**k for k in range(plan.n_downlink))
        scale_dl = 0.5 * math.pi**2 * qc_dl * params.lambda_b * math.sqrt(params.a * params.p_b) * s
    scale_ul = 0.0
    if plan.n_uplink > 0:
        qc_ul = _subset_q_c(dist, plan.n_uplink, plan.policy, qc_formula)
        scale_ul = 0.5 * math.pi * qc_ul * plan.n_uplink * math.sqrt(params.a * params.rho_b)
    return scale_dl + scale_ul


def _inversion_cutoff(c1: float, half_alpha: float, cos_phi: float) -> float:
    """Upper limit U with c1*U^(alpha/2) - U*cos_phi = 36 (envelope < e^-36)."""
    lo, hi = 1e-12, 1.0

    def g(u: float) -> float:
        return c1 * u**half_alpha - u * cos_phi - _ENVELOPE_LOG_TAIL

    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 1e18:
            raise ArithmeticError("inversion-integral cutoff not found")
    # plain bisection; g is continuous with g(lo) < 0 <= g(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return hi


def p_sufficient(
    params: NetworkParams,
    plan: ChannelPlan,
    scale: float | None = None,
    quad_spec: QuadratureSpec | None = None,
    dist: spectrum.CellLoadDist | None = None,
    qc_formula: Literal["policy", "rsa"] = "policy",
    method: Literal["auto", "closed", "integral"] = "auto",
) -> float:
    """Probability of harvesting enough power for channel inversion.

    Needs the harvested power to exceed rho_d * d_o^beta.  At alpha = 4
    this is erf(scale / (2 sqrt(rho_d d_o^beta))); for other exponents the
    stable-law CDF is recovered by an oscillatory inversion integral,
    truncated where its envelope falls below e^-36.  ``method`` forces one
    route; "auto" takes the closed form whenever alpha is 4.
    """
    alpha = params.alpha
    if scale is None:
        scale = harvest_scales(params, plan, dist, qc_formula)[2]
    if scale < 0.0:
        raise ValueError("harvest scale must be nonnegative")
    if scale == 0.0:
        return 0.0
    p_min = params.rho_d * params.d_o**params.beta
    is_quartic = abs(alpha - 4.0) < 1e-12
    if method == "closed" and not is_quartic:
        raise ValueError("closed-form route requires alpha == 4")
    if is_quartic and method != "integral":
        return erf(scale / (2.0 * math.sqrt(p_min)))

    half_alpha = alpha / 2.0
    phi = 2.0 * math.pi / alpha
    cos_phi, sin_phi = math.cos(phi), math.sin(phi)
    c1 = p_min / scale**half_alpha
    front = alpha / (2.0 * math.pi)

    def integrand(u: float) -> float:
        if u == 0.0:
            return front * sin_phi
        return (
            front
            / u
            * math.exp(-c1 * u**half_alpha - u * cos_phi)
            * math.sin(u * sin_phi)
        )

    upper = _inversion_cutoff(c1, half_alpha, cos_phi)
    spec = quad_spec or QuadratureSpec(rel_tol=1e-10, abs_tol=1e-12, max_subdivisions=1000)
    value = integrate_to_infinity(integrand, spec, upper=upper)
    return min(max(value, 0.0), 1.0)


def sinr_outage(
    params: NetworkParams,
    plan: ChannelPlan,
    p_s: float,
    p_f: float,
    q_d: float,
) -> float:
    """SINR outage probability at a typical D2D receiver.

    Exponent of the coverage probability = noise term + interference from
    other active D2D transmitters (density p_s*p_f*lambda_d) + interference
    from shared-channel cellular transmitters outside the protection
    region.  The cellular term uses the mean transmit power: p_b for a
    downlink shared channel, the power-controlled mean for uplink.
    """
    alpha, beta, tau = params.alpha, params.beta, params.tau
    for name, v in (("p_s", p_s), ("p_f", p_f), ("q_d", q_d)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1]")
    if tau == 0.0:
        return 0.0

    noise_term = tau * params.sigma_z2 / params.rho_d
    d2d_term = (
        2.0
        * math.pi**2
        * params.d_o**2
        * p_s
        * p_f
        * params.lambda_d
        / (beta * math.sin(2.0 * math.pi / beta))
        * tau ** (2.0 / beta)
    )
    if plan.d2d_side is Side.DOWNLINK:
        mean_power = params.p_b
    else:
        mean_power = params.rho_b / (math.pi * params.lambda_b) ** (alpha / 2.0)
    y = (params.rho_d / (params.gamma_sense * tau)) ** (1.0 / alpha) * math.gamma(
        (alpha + 1.0) / alpha
    )
    cell_term = (
        2.0
        * math.pi
        * q_d
        * params.lambda_b
        / (alpha - 2.0)
        * hyper_g(y, alpha)
        * (mean_power / params.rho_d * tau) ** (2.0 / alpha)
    )
    return 1.0 - math.exp(-(noise_term + d2d_term + cell_term))


def total_outage(p_t: float, o_d: float) -> float:
    """Overall outage: no energy, busy channel, or insufficient SINR."""
    if not 0.0 <= p_t <= 1.0 or not 0.0 <= o_d <= 1.0:
        raise ValueError("probabilities must be in [0, 1]")
    return 1.0 - p_t + p_t * o_d


def crossover_bs_density(params: NetworkParams) -> float:
    """Station density above which an uplink shared channel beats downlink.

    At this density the sensing exposure and the mean interferer power of
    the two placements coincide; beyond it, uplink power control keeps
    shrinking both while the downlink values grow.
    """
    return (params.rho_b / params.p_b) ** (2.0 / params.alpha) / math.pi


def evaluate(
    params: NetworkParams,
    plan: ChannelPlan,
    dist: spectrum.CellLoadDist | None = None,
    qc_formula: Literal["policy", "rsa"] = "policy",
    quad_spec: QuadratureSpec | None = None,
) -> D2DMetrics:
    """Compute every analytic D2D metric for one parameter point."""
    dist = dist or spectrum.CellLoadDist(params.mean_load)
    probs = spectrum.access_probs(dist, plan.n_total, plan.policy)
    scale_dl, scale_ul, scale = harvest_scales(params, plan, dist, qc_formula)
    ps = p_sufficient(params, plan, scale=scale, quad_spec=quad_spec)
    pf = p_free(params, plan, probs.q_d)
    pt = ps * pf
    od = sinr_outage(params, plan, ps, pf, probs.q_d)
    return D2DMetrics(
        p_s=ps,
        p_f=pf,
        p_t=pt,
        o_d=od,
        o_d_tot=total_outage(pt, od),
        harvest_scale_dl=scale_dl,
        harvest_scale_ul=scale_ul,
        harvest_scale=scale,
        sensing_exposure=sensing_exposure(params, plan),
        protection_radius_mean=protection_radius(params, plan),
        q_d=probs.q_d,
    )
