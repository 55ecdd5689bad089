"""Maximum-likelihood fitting for all ten families.

Likelihoods are maximised by bounded limited-memory quasi-Newton (L-BFGS-B)
on the log-transformed parameters, with analytic gradients throughout.  Log
parameters are confined to [-30, 30], so natural parameters live in
[e^-30, e^30]; boundary-limit cases such as a Gamma-like extended Pareto
then surface as parameters near 1e13 rather than as overflow.

Multistart
----------
Every family beyond the two-parameter ones is started from a structured
cascade of simpler fits:

* extended Pareto: moment estimates, the Gamma fit embedded at
  ``alpha = 1e10``, and the Pareto fit embedded at ``theta = 1``;
* four-parameter: the extended-Pareto fit with ``eta = 1``, and the Weibull
  fit embedded at ``(alpha, theta) = (1e10, 1)``;
* five-parameter: the extended-Pareto fit with ``tau = gamma = 1``, and the
  log-Gamma fit embedded at ``alpha = 1e10, tau = 1e10, gamma = scale*1e10``;
* five-parameter-2: the four-parameter fit with ``gamma = 1``;
* six-parameter: both five-parameter fits with the missing parameter at 1.

The best start by final log-likelihood wins; ties (within ``1e-9 * n``) go
to the earliest start in the order above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .claims import ClaimSample
from .params import (
    BURR_KINDS,
    DomainError,
    FamilyKind,
    FamilySpec,
    FitError,
    NumericError,
    ParamVector,
)
from .distributions import family_log_pdf

__all__ = [
    "LogLikelihood",
    "Gradient",
    "FitResult",
    "StartSet",
    "OptimSettings",
    "loglik",
    "gradient",
    "fit",
    "fit_all",
    "default_starts",
    "moment_start_extended_pareto",
]

_BOUNDARY = 1e10  # finite stand-in for parameters pushed to infinity
_SENTINEL = 1e30  # objective value reported when the likelihood is not finite


@dataclass(frozen=True)
class OptimSettings:
    """Optimiser controls, overridable through the CLI configuration."""

    max_iterations: int = 500
    log_bound: float = 30.0
    gradient_tolerance: float = 1e-6  # scaled by max(1, |loglik|) per start
    function_tolerance: float = 1e-12
    tie_tolerance: float = 1e-9  # per observation


@dataclass(frozen=True)
class LogLikelihood:
    value: float
    n: int
    per_observation: np.ndarray | None = None


@dataclass(frozen=True)
class Gradient:
    """Sums of the per-observation partials in natural parameter space."""

    d_alpha: float
    d_theta: float
    d_beta: float
    d_tau: float
    d_gamma: float
    d_eta: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.d_alpha, self.d_theta, self.d_beta, self.d_tau, self.d_gamma, self.d_eta]
        )


@dataclass(frozen=True)
class FitResult:
    spec: FamilySpec
    loglik: float
    converged: bool
    start_index: int
    iterations: int


@dataclass(frozen=True)
class StartSet:
    """Ordered start vectors in the fitted family's parameter layout."""

    vectors: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.vectors:
            raise DomainError("a start set must contain at least one vector")
        clean = tuple(tuple(float(v) for v in vec) for vec in self.vectors)
        object.__setattr__(self, "vectors", clean)
        for vec in clean:
            if any(not (math.isfinite(v) and v > 0.0) for v in vec):
                raise DomainError(f"start vector {vec} violates positivity")


def _values(sample) -> np.ndarray:
    z = sample.values if isinstance(sample, ClaimSample) else np.asarray(sample, dtype=float)
    if z.size == 0:
        raise DomainError("sample is empty")
    if np.any(~np.isfinite(z)) or np.any(z <= 0.0):
        raise DomainError("sample values must be strictly positive")
    return z


# ---------------------------------------------------------------------------
# Log-likelihood and analytic gradient
# ---------------------------------------------------------------------------


def loglik(sample, spec: FamilySpec, keep_per_observation: bool = False) -> LogLikelihood:
    """Sum of the family log-density over the sample.

    Returns ``-inf`` as a sentinel when any observation has zero density or
    the density evaluation degenerates numerically.
    """
    z = _values(sample)
    try:
        per = np.atleast_1d(family_log_pdf(z, spec))
    except NumericError:
        return LogLikelihood(-math.inf, int(z.size))
    value = float(per.sum()) if np.all(np.isfinite(per)) else -math.inf
    return LogLikelihood(value, int(z.size), per if keep_per_observation else None)


def _transform_ll_grad(z: np.ndarray, phi: tuple[float, ...]) -> tuple[float, np.ndarray]:
    """Log-likelihood and its six-vector gradient for a transform family.

    Shares every intermediate between the density and the partials:
    ``v = 1 + z/beta``, ``w = v^(1/gamma)``, ``x = (tau (w-1))^(1/eta)``,
    ``S = x / (alpha/theta + x)`` and ``R = w/(w-1)``.
    """
    alpha, theta, beta, tau, gamma, eta = phi
    logv = np.log1p(z / beta)
    t = logv / gamma
    w1 = np.expm1(np.minimum(t, 700.0))
    if np.any(w1 <= 0.0):
        raise NumericError("back-transformed coordinate underflows")
    logw1 = np.where(t > 30.0, t, np.log(w1))
    logx = (math.log(tau) + logw1) / eta
    u = logx + math.log(theta / alpha)
    softplus_u = np.logaddexp(0.0, u)
    ll = float(
        np.sum(
            (theta - eta) * logx - (alpha + theta) * softplus_u + (1.0 - gamma) / gamma * logv
        )
        + z.size
        * (
            special.gammaln(alpha + theta)
            - special.gammaln(alpha)
            - special.gammaln(theta)
            - theta * math.log(alpha / theta)
            + math.log(tau)
            - math.log(gamma * beta * eta)
        )
    )
    S = special.expit(u)
    R = 1.0 / (-np.expm1(-t))  # w/(w-1), stable for both tiny and huge t
    K = ((alpha + theta) * S - (theta - eta)) / eta
    psi_at = special.digamma(alpha + theta)
    n = z.size
    d_alpha = n * (psi_at - special.digamma(alpha) - theta / alpha) + np.sum(
        (alpha + theta) * S / alpha - softplus_u
    )
    d_theta = n * (psi_at - special.digamma(theta) + math.log(theta / alpha) + 1.0) + np.sum(
        logx - softplus_u - (alpha + theta) * S / theta
    )
    d_beta = -n / beta + np.sum(z * ((gamma - 1.0) + K * R) / (gamma * beta**2 * (1.0 + z / beta)))
    d_tau = np.sum(theta - (alpha + theta) * S) / (eta * tau)
    d_gamma = -n / gamma + np.sum(logv * (K * R - 1.0)) / gamma**2
    d_eta = -n / eta + np.sum(logx * ((alpha + theta) * S - theta)) / eta
    return ll, np.array([d_alpha, d_theta, d_beta, d_tau, d_gamma, d_eta])


def gradient(sample, phi: ParamVector) -> Gradient:
    """Analytic gradient of the transform-family log-likelihood at ``phi``."""
    z = _values(sample)
    _, g = _transform_ll_grad(z, phi.as_tuple())
    return Gradient(*g)


# Classical-family likelihoods with gradients, in each family's layout.


def _pareto_ll_grad(z, params):
    a, b = params
    n = z.size
    log1pzb = np.log1p(z / b)
    ll = n * math.log(a / b) - (a + 1.0) * log1pzb.sum()
    da = n / a - log1pzb.sum()
    db = -n / b + (a + 1.0) / b * np.sum(z / (b + z))
    return float(ll), np.array([da, db])


def _gamma_ll_grad(z, params):
    m, s = params
    n = z.size
    logz_sum = np.log(z).sum()
    zsum = z.sum()
    ll = n * (s * math.log(s / m) - special.gammaln(s)) + (s - 1.0) * logz_sum - s * zsum / m
    dm = s * (zsum - n * m) / m**2
    ds = n * (math.log(s / m) + 1.0 - special.digamma(s)) + logz_sum - zsum / m
    return float(ll), np.array([dm, ds])


def _weibull_ll_grad(z, params):
    k, lam = params
    n = z.size
    logr = np.log(z / lam)
    rk = np.exp(k * logr)
    ll = n * math.log(k / lam) + (k - 1.0) * logr.sum() - rk.sum()
    dk = n / k + np.sum(logr * (1.0 - rk))
    dlam = k / lam * (rk.sum() - n)
    return float(ll), np.array([dk, dlam])


def _log_gamma_ll_grad(z, params):
    b, c = params
    n = z.size
    y = np.log1p(z)
    ll = (
        n * (c * math.log(c / b) - special.gammaln(c))
        + (c - 1.0) * np.log(y).sum()
        - c * y.sum() / b
        - y.sum()
    )
    db = c * (y.sum() - n * b) / b**2
    dc = n * (math.log(c / b) + 1.0 - special.digamma(c)) + np.log(y).sum() - y.sum() / b
    return float(ll), np.array([db, dc])


# Positions of each family's free parameters inside the six-vector
# (alpha, theta, beta, tau, gamma, eta); frozen components stay at 1.
_PHI_INDEX: dict[FamilyKind, tuple[int, ...]] = {
    FamilyKind.EXTENDED_PARETO: (0, 1, 2),
    FamilyKind.FOUR_PARAM: (0, 1, 2, 5),
    FamilyKind.FIVE_PARAM: (0, 1, 2, 3, 4),
    FamilyKind.FIVE_PARAM2: (0, 1, 2, 5, 4),
    FamilyKind.SIX_PARAM: (0, 1, 2, 3, 4, 5),
}

_CLASSICAL_LL_GRAD = {
    FamilyKind.PARETO: _pareto_ll_grad,
    FamilyKind.GAMMA: _gamma_ll_grad,
    FamilyKind.WEIBULL: _weibull_ll_grad,
    FamilyKind.LOG_GAMMA: _log_gamma_ll_grad,
}


def _ll_grad_for(kind: FamilyKind, z: np.ndarray, params: np.ndarray):
    if kind in BURR_KINDS:
        phi = [1.0] * 6
        for position, value in zip(_PHI_INDEX[kind], params):
            phi[position] = value
        ll, g6 = _transform_ll_grad(z, tuple(phi))
        return ll, g6[list(_PHI_INDEX[kind])]
    return _CLASSICAL_LL_GRAD[kind](z, params)


# ---------------------------------------------------------------------------
# Optimisation
# ---------------------------------------------------------------------------


def _fit_log_normal(z: np.ndarray) -> FitResult:
    logz = np.log(z)
    xi = float(logz.mean())
    sigma = max(float(np.sqrt(np.mean((logz - xi) ** 2))), 1e-12)
    spec = FamilySpec(FamilyKind.LOG_NORMAL, (xi, sigma))
    return FitResult(spec, loglik(z, spec).value, True, 0, 0)


def fit(
    sample,
    kind: FamilyKind,
    starts: StartSet | None = None,
    settings: OptimSettings | None = None,
    cache: dict | None = None,
) -> FitResult:
    """Maximum-likelihood fit of one family by multistart quasi-Newton.

    The optimisation runs on log parameters within ``[-log_bound, log_bound]``
    with analytic gradients; a non-finite likelihood during the search is
    replaced by a large sentinel so the line search backtracks.  Raises
    ``FitError`` with per-start diagnostics when every start fails.
    """
    z = _values(sample)
    settings = settings or OptimSettings()
    if kind is FamilyKind.LOG_NORMAL:
        return _fit_log_normal(z)
    if starts is None:
        starts = default_starts(kind, z, cache=cache, settings=settings)

    bound = settings.log_bound
    attempts: list[tuple[float, np.ndarray, bool, int]] = []
    diagnostics: list[str] = []
    for index, vector in enumerate(starts.vectors):
        x0 = np.clip(np.log(np.asarray(vector)), -bound + 1e-9, bound - 1e-9)

        def objective(x):
            try:
                with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                    ll, grad_nat = _ll_grad_for(kind, z, np.exp(x))
            except (NumericError, FloatingPointError, OverflowError):
                return _SENTINEL, np.zeros_like(x)
            if not np.isfinite(ll) or not np.all(np.isfinite(grad_nat)):
                return _SENTINEL, np.zeros_like(x)
            return -ll, -grad_nat * np.exp(x)

        f0 = objective(x0)[0]
        if f0 >= _SENTINEL:
            diagnostics.append(f"start {index} {tuple(vector)}: likelihood not finite at start")
            continue
        gtol = settings.gradient_tolerance * max(1.0, abs(f0))
        result = optimize.minimize(
            objective,
            x0,
            jac=True,
            method="L-BFGS-B",
            bounds=[(-bound, bound)] * x0.size,
            options={
                "maxiter": settings.max_iterations,
                "maxfun": 20 * settings.max_iterations,
                "ftol": settings.function_tolerance,
                "gtol": gtol,
            },
        )
        if not np.isfinite(result.fun) or result.fun >= _SENTINEL:
            diagnostics.append(f"start {index} {tuple(vector)}: optimiser returned non-finite value")
            continue
        attempts.append((-float(result.fun), np.exp(result.x), bool(result.success), int(result.nit)))
        diagnostics.append(f"start {index} {tuple(vector)}: loglik {-result.fun:.6f} ({result.message})")

    if not attempts:
        raise FitError(f"all {len(starts.vectors)} starts failed for {kind.value}", diagnostics)

    best = max(range(len(attempts)), key=lambda i: attempts[i][0])
    # earliest start wins ties within tie_tolerance per observation
    tie = settings.tie_tolerance * z.size
    for i in range(len(attempts)):
        if attempts[i][0] >= attempts[best][0] - tie:
            best = i
            break
    ll_best, params, success, iterations = attempts[best]
    spec = FamilySpec(kind, tuple(params))
    return FitResult(spec, ll_best, success, best, iterations)


def fit_all(
    sample,
    kinds: tuple[FamilyKind, ...] | None = None,
    settings: OptimSettings | None = None,
) -> dict[FamilyKind, FitResult]:
    """Fit several families, sharing the multistart cascade's intermediate fits."""
    from .params import FAMILY_ORDER

    z = _values(sample)
    cache: dict[FamilyKind, FitResult] = {}
    out: dict[FamilyKind, FitResult] = {}
    for kind in kinds if kinds is not None else FAMILY_ORDER:
        out[kind] = _cached_fit(kind, z, cache, settings)
    return out


def _cached_fit(kind, z, cache, settings) -> FitResult:
    if cache is not None and kind in cache:
        return cache[kind]
    result = fit(z, kind, settings=settings, cache=cache)
    if cache is not None:
        cache[kind] = result
    return result


# ---------------------------------------------------------------------------
# Start values
# ---------------------------------------------------------------------------


def moment_start_extended_pareto(sample) -> tuple[float, float, float]:
    """Moment estimates for the extended Pareto triple ``(alpha, theta, beta)``.

    Equates the first three sample moments to
    ``E(Z^r) = beta^r (alpha/theta)^r Gamma(theta+r) Gamma(alpha-r) /
    (Gamma(theta) Gamma(alpha))``.  The two moment ratios depend only on
    ``(alpha, theta)`` and the system collapses to one linear equation in
    ``alpha``, so the solve is exact.  Falls back to ``(3, 1, mean)``
    whenever the third sample moment is unstable or the solution leaves the
    region ``alpha > 3`` where three moments exist.
    """
    z = _values(sample)
    fallback = (3.0, 1.0, float(z.mean()))
    if z.size < 3:
        return fallback
    cubes = z**3
    m1, m2, m3 = float(z.mean()), float(np.mean(z**2)), float(cubes.mean())
    if not all(map(math.isfinite, (m1, m2, m3))):
        return fallback
    # a third moment dominated by its single largest term is noise, not signal
    if float(cubes.max()) > 0.10 * float(cubes.sum()):
        return fallback
    r2 = m2 / m1**2
    r3 = m3 / (m1 * m2)
    denominator = 2.0 * r2 - r3 - 1.0
    if abs(denominator) < 1e-12:
        return fallback
    alpha = (4.0 * r2 - 3.0 * r3 - 1.0) / denominator
    if not (alpha > 3.0 and math.isfinite(alpha)):
        return fallback
    inv_theta = r2 * (alpha - 2.0) / (alpha - 1.0) - 1.0
    if inv_theta <= 0.0:
        return fallback
    theta = 1.0 / inv_theta
    beta = m1 * (alpha - 1.0) / alpha
    if not (theta > 0.0 and beta > 0.0 and math.isfinite(theta) and math.isfinite(beta)):
        return fallback
    return (float(alpha), float(theta), float(beta))


def _pareto_start(z: np.ndarray) -> tuple[float, float]:
    """Probability-weighted-moments start for the Pareto pair ``(shape, scale)``."""
    z_sorted = np.sort(z)
    n = z.size
    t0 = float(z.mean())
    t1 = float(np.mean(z_sorted * (1.0 - (np.arange(1, n + 1) - 0.5) / n)))
    denominator = t0 - 2.0 * t1
    if denominator <= 0.0:
        return (2.0, t0)
    xi = 2.0 - t0 / denominator
    sigma = 2.0 * t0 * t1 / denominator
    if not (0.0 < xi < 1.0) or sigma <= 0.0:
        return (2.0, t0)
    return (min(max(1.0 / xi, 0.6), 100.0), sigma / xi)


def _weibull_start(z: np.ndarray) -> tuple[float, float]:
    cv = z.std() / z.mean()
    shape = min(max(cv**-1.086, 0.05), 50.0)
    scale = z.mean() / math.exp(special.gammaln(1.0 + 1.0 / shape))
    return (shape, scale)


def _moment_pair(y: np.ndarray) -> tuple[float, float]:
    """Mean and mean^2/variance, clipped into the optimiser's range."""
    mean = float(y.mean())
    var = float(y.var())
    shape = mean**2 / var if var > 0 else 1.0
    return (mean, min(max(shape, 1e-6), 1e12))


def default_starts(
    kind: FamilyKind,
    sample,
    cache: dict | None = None,
    settings: OptimSettings | None = None,
) -> StartSet:
    """The structured multistart cascade (see module docstring).

    A prerequisite fit that fails is replaced by documented fallback
    constants: ``(mean, 1)`` for the Gamma, ``(2, mean)`` for the Pareto,
    ``(1, mean)`` for the Weibull, ``(mean(log(1+z)), 1)`` for the
    log-Gamma, and ``(3, 1, mean)`` for the extended Pareto.
    """
    z = _values(sample)
    cache = cache if cache is not None else {}

    def fitted(prereq: FamilyKind, fallback: tuple[float, ...]) -> tuple[float, ...]:
        try:
            return _cached_fit(prereq, z, cache, settings).spec.params
        except FitError:
            return fallback

    mean = float(z.mean())
    if kind is FamilyKind.LOG_NORMAL:
        logz = np.log(z)
        return StartSet(((float(logz.mean()), float(logz.std()) or 1.0),))
    if kind is FamilyKind.GAMMA:
        return StartSet((_moment_pair(z),))
    if kind is FamilyKind.WEIBULL:
        return StartSet((_weibull_start(z),))
    if kind is FamilyKind.LOG_GAMMA:
        mean_y, shape = _moment_pair(np.log1p(z))
        return StartSet(((mean_y, shape),))
    if kind is FamilyKind.PARETO:
        return StartSet((_pareto_start(z),))
    if kind is FamilyKind.EXTENDED_PARETO:
        ga_mean, ga_shape = fitted(FamilyKind.GAMMA, (mean, 1.0))
        pa_shape, pa_scale = fitted(FamilyKind.PARETO, (2.0, mean))
        return StartSet(
            (
                moment_start_extended_pareto(z),
                (_BOUNDARY, ga_shape, ga_mean),
                (pa_shape, 1.0, pa_scale),
            )
        )
    if kind is FamilyKind.FOUR_PARAM:
        ep = fitted(FamilyKind.EXTENDED_PARETO, (3.0, 1.0, mean))
        we_shape, we_scale = fitted(FamilyKind.WEIBULL, (1.0, mean))
        return StartSet(((*ep, 1.0), (_BOUNDARY, 1.0, we_scale, 1.0 / we_shape)))
    if kind is FamilyKind.FIVE_PARAM:
        ep = fitted(FamilyKind.EXTENDED_PARETO, (3.0, 1.0, mean))
        lg_scale, lg_shape = fitted(FamilyKind.LOG_GAMMA, (float(np.log1p(z).mean()), 1.0))
        return StartSet(
            ((*ep, 1.0, 1.0), (_BOUNDARY, lg_shape, 1.0, _BOUNDARY, lg_scale * _BOUNDARY))
        )
    if kind is FamilyKind.FIVE_PARAM2:
        fp = fitted(FamilyKind.FOUR_PARAM, (3.0, 1.0, mean, 1.0))
        return StartSet(((*fp, 1.0),))
    if kind is FamilyKind.SIX_PARAM:
        a5, t5, b5, tau5, g5 = fitted(FamilyKind.FIVE_PARAM, (3.0, 1.0, mean, 1.0, 1.0))
        a52, t52, b52, e52, g52 = fitted(FamilyKind.FIVE_PARAM2, (3.0, 1.0, mean, 1.0, 1.0))
        return StartSet(
            (
                (a5, t5, b5, tau5, g5, 1.0),
                (a52, t52, b52, 1.0, g52, e52),
            )
        )
    raise DomainError(f"no start recipe for {kind!r}")  # pragma: no cover
