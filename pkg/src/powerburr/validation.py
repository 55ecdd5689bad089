"""Model validation: parametric bootstrap intervals and the binomial back-test.

The bootstrap is parametric: synthetic samples are drawn from the fitted
distribution, the same family is refitted to each, and the statistic of
interest is recomputed, giving a percentile interval.  The back-test counts
sample exceedances of an estimated quantile and scores them with the exact
two-sided binomial test (minimum-likelihood convention: the p-value sums the
probabilities of all outcomes no more likely than the observed one).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .claims import ClaimSample
from .params import DomainError, FamilyKind, FamilySpec, FitError
from .fitting import OptimSettings, fit
from .sampling import RngStream, draw_family

__all__ = ["BootstrapCI", "BacktestReport", "bootstrap_ci", "binomial_backtest"]


class BootstrapError(RuntimeError):
    """Too many bootstrap refits failed for the interval to be trusted."""


@dataclass(frozen=True)
class BootstrapCI:
    point: float
    lower: float
    upper: float
    level: float
    m_b: int
    n_failed: int = 0

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError("bootstrap interval has lower > upper")


@dataclass(frozen=True)
class BacktestReport:
    n: int
    level: float
    exceedances: int
    expected: float
    p_value: float


def bootstrap_ci(
    fitted: FamilySpec,
    n: int,
    statistic: Callable[[FamilySpec], float],
    stream: RngStream,
    level: float = 0.95,
    m_b: int = 1000,
    settings: OptimSettings | None = None,
    max_failure_fraction: float = 0.10,
) -> BootstrapCI:
    """Percentile bootstrap interval for a functional of a fitted family.

    Draws ``m_b`` synthetic samples of size ``n`` from ``fitted``, refits the
    same family to each (replicate ``j`` on the ``j``-th derived substream),
    and returns the percentile interval of the statistic at ``level``.
    Aborts with ``BootstrapError`` when more than ``max_failure_fraction`` of
    the refits fail.
    """
    if m_b < 100:
        raise DomainError("m_b must be at least 100")
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie strictly between 0 and 1")
    point = float(statistic(fitted))
    values = []
    failures = 0
    for j in range(m_b):
        z = draw_family(stream.child(j), fitted, n)
        try:
            refit = fit(z, fitted.kind, settings=settings)
            values.append(float(statistic(refit.spec)))
        except (FitError, ArithmeticError):
            failures += 1
    if failures > max_failure_fraction * m_b:
        raise BootstrapError(
            f"{failures}/{m_b} bootstrap refits failed (limit {max_failure_fraction:.0%})"
        )
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(np.asarray(values), [tail, 1.0 - tail])
    return BootstrapCI(
        point=point, lower=float(lower), upper=float(upper), level=level, m_b=m_b,
        n_failed=failures,
    )


def binomial_backtest(sample, q: float, epsilon: float) -> BacktestReport:
    """Exact two-sided test that losses exceed ``q`` with probability ``epsilon``."""
    values = sample.values if isinstance(sample, ClaimSample) else np.asarray(sample, dtype=float)
    if values.size == 0:
        raise DomainError("sample is empty")
    if not q > 0.0:
        raise DomainError("threshold q must be positive")
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie strictly between 0 and 1")
    n = int(values.size)
    exceedances = int(np.count_nonzero(values > q))
    p_value = float(stats.binomtest(exceedances, n, epsilon).pvalue)
    return BacktestReport(
        n=n, level=epsilon, exceedances=exceedances, expected=n * epsilon, p_value=p_value
    )
