"""Special functions and numerical integration backing the closed-form results.

Everything here is a pure function.  The Gauss hypergeometric evaluator is
restricted to the arguments the outage formulas actually produce
(``c > 0``, ``z <= 0``) and is not a general-purpose implementation.
"""

import math
from dataclasses import dataclass

import scipy.integrate

SERIES_MAX_TERMS = 10_000
SERIES_REL_CUTOFF = 1e-15
# Beyond |z| = 4 the linear-fraction (Pfaff) series slows down; switch to the
# 1/z connection formula, whose series argument is then at most 1/4.
_PFAFF_Z_LIMIT = 4.0


class ConvergenceError(ArithmeticError):
    """A series did not converge within the term cap."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed; ``partial`` holds the best estimate."""

    def __init__(self, message: str, partial: float):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and subdivision budget for adaptive quadrature."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 500

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for positive arguments."""
    if x <= 0.0:
        raise ValueError("log_gamma requires x > 0")
    return math.lgamma(x)


def erf(x: float) -> float:
    """Error function; exact odd symmetry, |error| <= 1e-12."""
    return math.erf(x)


def _gauss_series(a: float, b: float, c: float, z: float) -> float:
    """Defining series sum_n (a)_n (b)_n / (c)_n z^n / n! for |z| < 1.

    Terminates early for polynomial cases; raises once the term cap is hit
    while terms are still significant.
    """
    total = 1.0
    term = 1.0
    for n in range(SERIES_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (1.0 + n)) * z
        total += term
        if abs(term) < SERIES_REL_CUTOFF * abs(total):
            return total
    raise ConvergenceError(
        f"hypergeometric series did not converge (a={a}, b={b}, c={c}, z={z})"
    )


def _rgamma(x: float) -> float:
    """1 / gamma(x), zero at the poles (x = 0, -1, -2, ...)."""
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for z <= 0, c > 0.

    Strategy: for moderate |z| apply the Pfaff transformation
    2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)), which maps z <= 0
    into [0, 1); for large |z| use the z -> 1/z connection formula so the
    series argument stays small.  The connection formula degenerates when
    a - b is an integer; those inputs fall back to the Pfaff series, which
    still converges (slowly) for any finite z < 0.
    """
    if c <= 0.0:
        raise ValueError("gauss_2f1 requires c > 0")
    if z > 0.0:
        raise ValueError("gauss_2f1 requires z <= 0")
    if z == 0.0:
        return 1.0
    ab_int = abs((a - b) - round(a - b)) < 1e-12
    if z >= -_PFAFF_Z_LIMIT or ab_int:
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _gauss_series(a, c - b, c, w)
    # DLMF 15.8.2 with argument 1/z in (-1/4, 0).
    inv = 1.0 / z
    neg_z = -z
    coef1 = math.gamma(c) * math.gamma(b - a) * _rgamma(b) * _rgamma(c - a)
    coef2 = math.gamma(c) * math.gamma(a - b) * _rgamma(a) * _rgamma(c - b)
    term1 = 0.0
    if coef1 != 0.0:
        term1 = coef1 * neg_z ** (-a) * _gauss_series(a, a - c + 1.0, a - b + 1.0, inv)
    term2 = 0.0
    if coef2 != 0.0:
        term2 = coef2 * neg_z ** (-b) * _gauss_series(b, b - c + 1.0, b - a + 1.0, inv)
    return term1 + term2


def hyper_g(y: float, alpha: float) -> float:
    """Interference tail kernel y^(2-alpha) 2F1(1, 1-2/alpha; 2-2/alpha; -y^-alpha).

    Strictly decreasing in y; for alpha = 4 it reduces to arctan(y^-2).
    """
    if y <= 0.0:
        raise ValueError("hyper_g requires y > 0")
    if alpha <= 2.0:
        raise ValueError("hyper_g requires alpha > 2")
    a = 1.0
    b = (alpha - 2.0) / alpha
    c = (2.0 * alpha - 2.0) / alpha
    log_inv = -alpha * math.log(y)
    if log_inv > 640.0:
        # y -> 0 limit: the second connection term dominates and the powers
        # of y cancel, leaving a finite constant.
        return math.gamma(c) * math.gamma(a - b) * _rgamma(a) * _rgamma(c - b)
    return y ** (2.0 - alpha) * gauss_2f1(a, b, c, -math.exp(log_inv))


def integrate_to_infinity(f, spec: QuadratureSpec | None = None, upper: float | None = None) -> float:
    """Adaptive quadrature of ``f`` over (0, upper], defaulting to (0, inf).

    The caller is responsible for any removable singularity at 0 (define
    f(0) as the limit) and, when passing ``upper``, for choosing it past
    the point where the tail is below ``abs_tol``.
    """
    spec = spec or QuadratureSpec()
    hi = math.inf if upper is None else upper
    value, abserr, info, *rest = scipy.integrate.quad(
        f,
        0.0,
        hi,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=True,
    )
    if rest:  # quad appends a message (and possibly more) on failure
        raise QuadratureError(f"quadrature failed: {rest[0]}", partial=value)
    if abserr > max(spec.abs_tol, spec.rel_tol * abs(value)) * 10.0:
        raise QuadratureError(
            f"quadrature error estimate {abserr:g} above tolerance", partial=value
        )
    return value
