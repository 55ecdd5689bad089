"""Classical special cases reached inside or on the boundary of the family.

Ten classical laws arise from the ratio-of-Gammas construction pushed
through the power transform, most of them only in a parameter limit.  The
``"-> infinity"`` components are stood in for by a caller-supplied finite
``limit_magnitude`` (default 1e6) and the ``"-> 0"`` components by its
reciprocal.

Mappings (shape parameters ``a``, ``c``; scale ``b``; ``M`` the magnitude):

===============  =========================================  =========================================
case             definition                                 (alpha, theta, beta, tau, gamma, eta)
===============  =========================================  =========================================
BURR             Z = b G_c / G_a                            (a, c, b, 1, 1, 1)
PARETO           survival (1 + z/b)^-a                      (a, 1, b/a, 1, 1, 1)
GAMMA            Z = b G_c                                  (M, c, b, 1, 1, 1)
INVERSE_GAMMA    Z = b / G_a                                (a, M, b, 1, 1, 1)
LOG_GAMMA        log(1+Z) = b G_c                           (M, c, 1, M/b, M, 1)
LOGISTIC         survival 2 / (1 + e^(z/b))                 (1, 1, bM, 1/2, 1/M, 1)
LOG_LOGISTIC     survival 1 / (1 + (z/b)^a)                 (1, 1, b M^(-1/a), 1/M, 1/a, 1)
WEIBULL          Z = b G_1^a                                (M, 1, b M^(-a), 1/M, a, 1)
FRECHET          CDF exp(-(z/b)^-a)                         (1, M, b M^(-1/a), 1/M, 1/a, 1)
LOG_NORMAL       log Z ~ N(xi, sigma)                       (th^2, th, e^(xi+1/2-s*sqrt(th)),
                                                             s*sqrt(th), th*s^2, 1), th ~ M capped
===============  =========================================  =========================================

The Pareto scale is ``b/a`` (not ``b``): the theta = 1 ratio has survival
``(1 + x/alpha)^-alpha``, so matching ``(1 + z/b)^-a`` forces
``beta*alpha = b``.  Likewise the Weibull/Frechet rows take ``alpha -> inf``
with ``theta = 1`` (respectively ``theta -> inf`` with ``alpha = 1``) and
the Frechet/log-logistic outer power is ``1/a``.  Each mapping here is
verified by a distributional test against the closed-form target law.

The log-normal surrogate needs ``alpha -> inf`` faster than ``theta``
(``theta/alpha -> 0``), hence ``alpha = theta^2``; ``theta`` is capped so
that ``beta = exp(xi + 1/2 - sigma*sqrt(theta))`` stays above the float64
underflow threshold.  At the cap the residual distortion is O(1/sqrt(theta))
~ 2e-3, far inside the test tolerances.
"""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy import special

from .params import DomainError, ParamVector, UnsupportedKindError

__all__ = ["SpecialCase", "special_case_params", "special_case_cdf", "draw_special_case"]

# Largest sigma*sqrt(theta) allowed in the log-normal surrogate; keeps
# beta = exp(xi + 1/2 - sigma*sqrt(theta)) a normal float64 for |xi| <~ 80.
_LOG_NORMAL_EXPONENT_CAP = 600.0


class SpecialCase(enum.Enum):
    BURR = "burr"
    PARETO = "pareto"
    GAMMA = "gamma"
    INVERSE_GAMMA = "inverse_gamma"
    LOG_GAMMA = "log_gamma"
    LOGISTIC = "logistic"
    LOG_LOGISTIC = "log_logistic"
    WEIBULL = "weibull"
    FRECHET = "frechet"
    LOG_NORMAL = "log_normal"


def _need(kind: SpecialCase, **given) -> tuple[float, ...]:
    missing = [name for name, value in given.items() if value is None]
    if missing:
        raise DomainError(f"{kind.value} requires parameters {sorted(given)}; missing {missing}")
    values = tuple(float(v) for v in given.values())
    if any(not math.isfinite(v) for v in values):
        raise DomainError(f"{kind.value} parameters must be finite")
    return values


def special_case_params(
    kind: SpecialCase,
    *,
    a: float | None = None,
    b: float | None = None,
    c: float | None = None,
    xi: float | None = None,
    sigma: float | None = None,
    limit_magnitude: float = 1e6,
) -> ParamVector:
    """Parameter vector approximating (or realising) a classical special case.

    ``a`` and ``c`` are the target family's shape parameters, ``b`` its
    scale, following the definitions in the module docstring; the log-normal
    instead takes ``xi`` and ``sigma``.  ``limit_magnitude`` replaces each
    infinite boundary component (its reciprocal each vanishing one).
    """
    if not isinstance(kind, SpecialCase):
        raise UnsupportedKindError(f"unknown special case {kind!r}")
    M = float(limit_magnitude)
    if not (math.isfinite(M) and M > 1.0):
        raise DomainError("limit_magnitude must be finite and exceed 1")
    if kind is SpecialCase.BURR:
        a, c, b = _need(kind, a=a, c=c, b=b)
        return ParamVector(a, c, b, 1.0, 1.0, 1.0)
    if kind is SpecialCase.PARETO:
        a, b = _need(kind, a=a, b=b)
        return ParamVector(a, 1.0, b / a, 1.0, 1.0, 1.0)
    if kind is SpecialCase.GAMMA:
        c, b = _need(kind, c=c, b=b)
        return ParamVector(M, c, b, 1.0, 1.0, 1.0)
    if kind is SpecialCase.INVERSE_GAMMA:
        a, b = _need(kind, a=a, b=b)
        return ParamVector(a, M, b, 1.0, 1.0, 1.0)
    if kind is SpecialCase.LOG_GAMMA:
        c, b = _need(kind, c=c, b=b)
        return ParamVector(M, c, 1.0, M / b, M, 1.0)
    if kind is SpecialCase.LOGISTIC:
        (b,) = _need(kind, b=b)
        return ParamVector(1.0, 1.0, b * M, 0.5, 1.0 / M, 1.0)
    if kind is SpecialCase.LOG_LOGISTIC:
        a, b = _need(kind, a=a, b=b)
        return ParamVector(1.0, 1.0, b * M ** (-1.0 / a), 1.0 / M, 1.0 / a, 1.0)
    if kind is SpecialCase.WEIBULL:
        a, b = _need(kind, a=a, b=b)
        return ParamVector(M, 1.0, b * M ** (-a), 1.0 / M, a, 1.0)
    if kind is SpecialCase.FRECHET:
        a, b = _need(kind, a=a, b=b)
        return ParamVector(1.0, M, b * M ** (-1.0 / a), 1.0 / M, 1.0 / a, 1.0)
    if kind is SpecialCase.LOG_NORMAL:
        xi, sigma = _need(kind, xi=xi, sigma=sigma)
        theta = min(M, ((_LOG_NORMAL_EXPONENT_CAP - abs(xi)) / sigma) ** 2)
        return ParamVector(
            theta * theta,
            theta,
            math.exp(xi + 0.5 - sigma * math.sqrt(theta)),
            sigma * math.sqrt(theta),
            theta * sigma * sigma,
            1.0,
        )
    raise UnsupportedKindError(f"unknown special case {kind!r}")  # pragma: no cover


def special_case_cdf(kind: SpecialCase, z, **params):
    """Closed-form CDF of the target classical law (limit-law test oracle)."""
    z = np.asarray(z, dtype=float)
    if kind is SpecialCase.BURR:
        a, c, b = (params[k] for k in ("a", "c", "b"))
        x = z / b
        return special.betainc(c, a, c * x / (c * x + a))
    if kind is SpecialCase.PARETO:
        a, b = params["a"], params["b"]
        return -np.expm1(-a * np.log1p(z / b))
    if kind is SpecialCase.GAMMA:
        c, b = params["c"], params["b"]
        return special.gammainc(c, c * z / b)
    if kind is SpecialCase.INVERSE_GAMMA:
        a, b = params["a"], params["b"]
        return special.gammaincc(a, a * b / z)
    if kind is SpecialCase.LOG_GAMMA:
        c, b = params["c"], params["b"]
        return special.gammainc(c, c * np.log1p(z) / b)
    if kind is SpecialCase.LOGISTIC:
        return np.tanh(z / (2.0 * params["b"]))
    if kind is SpecialCase.LOG_LOGISTIC:
        a, b = params["a"], params["b"]
        return 1.0 / (1.0 + (z / b) ** -a)
    if kind is SpecialCase.WEIBULL:
        a, b = params["a"], params["b"]
        return -np.expm1(-((z / b) ** (1.0 / a)))
    if kind is SpecialCase.FRECHET:
        a, b = params["a"], params["b"]
        return np.exp(-((z / b) ** -a))
    if kind is SpecialCase.LOG_NORMAL:
        return special.ndtr((np.log(z) - params["xi"]) / params["sigma"])
    raise UnsupportedKindError(f"unknown special case {kind!r}")


def draw_special_case(rng: np.random.Generator, kind: SpecialCase, size: int, **params):
    """Exact sampler for the target classical law (limit-law test oracle)."""
    if kind is SpecialCase.BURR:
        a, c, b = (params[k] for k in ("a", "c", "b"))
        return b * rng.gamma(c, 1.0 / c, size) / rng.gamma(a, 1.0 / a, size)
    if kind is SpecialCase.PARETO:
        a, b = params["a"], params["b"]
        return b * np.expm1(-np.log1p(-rng.random(size)) / a)
    if kind is SpecialCase.GAMMA:
        c, b = params["c"], params["b"]
        return rng.gamma(c, b / c, size)
    if kind is SpecialCase.INVERSE_GAMMA:
        a, b = params["a"], params["b"]
        return b / rng.gamma(a, 1.0 / a, size)
    if kind is SpecialCase.LOG_GAMMA:
        c, b = params["c"], params["b"]
        return np.expm1(rng.gamma(c, b / c, size))
    if kind is SpecialCase.LOGISTIC:
        u = rng.random(size)
        return params["b"] * np.log((1.0 + u) / (1.0 - u))
    if kind is SpecialCase.LOG_LOGISTIC:
        a, b = params["a"], params["b"]
        u = rng.random(size)
        return b * (u / (1.0 - u)) ** (1.0 / a)
    if kind is SpecialCase.WEIBULL:
        a, b = params["a"], params["b"]
        return b * rng.exponential(1.0, size) ** a
    if kind is SpecialCase.FRECHET:
        a, b = params["a"], params["b"]
        return b * rng.exponential(1.0, size) ** (-1.0 / a)
    if kind is SpecialCase.LOG_NORMAL:
        return np.exp(params["xi"] + params["sigma"] * rng.standard_normal(size))
    raise UnsupportedKindError(f"unknown special case {kind!r}")
