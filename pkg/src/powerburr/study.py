"""Simulation-study harness: bias and RMSE of quantile and reserve estimates.

One study runs ``num_replications`` independent replications against a single
true severity family.  Each replication draws ``n`` losses, fits the
requested families (sharing the multistart cascade's intermediate fits),
and evaluates for every fitted family the upper quantiles of the severity
distribution and the Monte Carlo reserves over the configured intensity and
level grids.  Cells aggregate ``estimate - truth`` into bias and RMSE over
the successful replications; failures are counted, never silently dropped.

Replication ``k`` owns stream id ``k`` under the master seed, so results are
identical for any worker count.  Truth for reserves comes from one
high-precision run (``truth_m`` totals, default 1e6) on a reserved stream.
"""

from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .params import (
    DomainError,
    FAMILY_LABELS,
    FAMILY_ORDER,
    FamilyKind,
    FamilySpec,
    FitError,
    NumericError,
    ConvergenceError,
)
from .distributions import family_quantile
from .fitting import OptimSettings, _cached_fit, _values
from .risk import PortfolioSpec, reserve, simulate_totals
from .sampling import RngStream, draw_family

__all__ = [
    "StudyConfig",
    "CellStats",
    "StudyResult",
    "run_study",
    "emit_table",
    "study_csv",
]

#: Stream id reserved for the high-precision truth baseline.
TRUTH_STREAM_ID = 0xFFFFFFFF

#: Reference parameter choices for the ten study families (mean ~1 except
#: the log-Gamma; tails ranging from medium to very heavy).
REFERENCE_SPECS: dict[FamilyKind, FamilySpec] = {
    FamilyKind.LOG_NORMAL: FamilySpec(FamilyKind.LOG_NORMAL, (-0.5, 1.0)),
    FamilyKind.LOG_GAMMA: FamilySpec(FamilyKind.LOG_GAMMA, (0.75, 5.0)),
    FamilyKind.WEIBULL: FamilySpec(FamilyKind.WEIBULL, (2.0, 1.13)),
    FamilyKind.PARETO: FamilySpec(FamilyKind.PARETO, (3.0, 2.0)),
    FamilyKind.GAMMA: FamilySpec(FamilyKind.GAMMA, (1.0, 2.0)),
    FamilyKind.EXTENDED_PARETO: FamilySpec(FamilyKind.EXTENDED_PARETO, (3.0, 2.0, 1.0)),
    FamilyKind.FOUR_PARAM: FamilySpec(FamilyKind.FOUR_PARAM, (4.0, 2.0, 0.6, 1.3)),
    FamilyKind.FIVE_PARAM: FamilySpec(FamilyKind.FIVE_PARAM, (4.0, 2.0, 2.7, 5.0, 1.3)),
    FamilyKind.FIVE_PARAM2: FamilySpec(FamilyKind.FIVE_PARAM2, (4.0, 2.0, 0.5, 1.2, 1.1)),
    FamilyKind.SIX_PARAM: FamilySpec(FamilyKind.SIX_PARAM, (4.0, 2.0, 4.0, 10.0, 1.2, 1.3)),
}

#: True families reported by default: the six classical ones.
DEFAULT_TRUE_KINDS: tuple[FamilyKind, ...] = FAMILY_ORDER[:6]

#: Quantile target key: ("quantile", epsilon).  Reserve target key:
#: ("reserve", epsilon, lambda).
Target = tuple


@dataclass(frozen=True)
class StudyConfig:
    """Configuration of one study column (a single true family)."""

    true_spec: FamilySpec
    n: int
    num_replications: int = 1000
    lambdas: tuple[float, ...] = (10.0, 100.0, 1000.0)
    epsilons: tuple[float, ...] = (0.05, 0.01)
    m: int = 100_000
    master_seed: int = 0
    fitted_kinds: tuple[FamilyKind, ...] = FAMILY_ORDER
    truth_m: int = 1_000_000

    def __post_init__(self):
        if self.n < 1 or self.num_replications < 1 or self.m < 1 or self.truth_m < 1:
            raise DomainError("n, num_replications, m and truth_m must be positive")
        for eps in self.epsilons:
            if not 0.0 < eps < 1.0:
                raise DomainError("epsilons must lie strictly between 0 and 1")
        for lam in self.lambdas:
            if not lam > 0.0:
                raise DomainError("lambdas must be positive")

    def targets(self) -> list[Target]:
        out: list[Target] = [("quantile", eps) for eps in self.epsilons]
        out += [("reserve", eps, lam) for lam in self.lambdas for eps in self.epsilons]
        return out


@dataclass(frozen=True)
class CellStats:
    bias: float
    rmse: float
    n_success: int
    n_failed: int


@dataclass
class StudyResult:
    config: StudyConfig
    truth: dict[Target, float]
    cells: dict[tuple[FamilyKind, Target], CellStats]
    fit_failures: dict[FamilyKind, int] = field(default_factory=dict)

    def cell(self, kind: FamilyKind, target: Target) -> CellStats:
        return self.cells[(kind, target)]


def _replicate(config: StudyConfig, k: int, settings: OptimSettings | None):
    """One replication: sample, fit everything, evaluate all targets."""
    stream = RngStream(config.master_seed, k)
    z = draw_family(stream.child(0), config.true_spec, config.n)
    cache: dict[FamilyKind, object] = {}
    estimates: dict[tuple[FamilyKind, Target], float] = {}
    failed: set[FamilyKind] = set()
    for kind_index, kind in enumerate(config.fitted_kinds):
        try:
            fitted = _cached_fit(kind, z, cache, settings).spec
            for eps in config.epsilons:
                estimates[(kind, ("quantile", eps))] = family_quantile(1.0 - eps, fitted)
            for lam_index, lam in enumerate(config.lambdas):
                totals = simulate_totals(
                    PortfolioSpec.from_lambda(lam),
                    fitted,
                    config.m,
                    stream.child(1, kind_index, lam_index),
                )
                for eps in config.epsilons:
                    estimates[(kind, ("reserve", eps, lam))] = reserve(totals, eps)
        except (FitError, NumericError, ConvergenceError, OverflowError):
            failed.add(kind)
    return estimates, failed


def run_study(
    config: StudyConfig,
    threads: int = 1,
    settings: OptimSettings | None = None,
    progress: bool = False,
) -> StudyResult:
    """Run all replications and aggregate bias/RMSE cells against truth."""
    _values(draw_family(RngStream(config.master_seed, 0).child(0), config.true_spec, 2))

    truth: dict[Target, float] = {}
    for eps in config.epsilons:
        truth[("quantile", eps)] = family_quantile(1.0 - eps, config.true_spec)
    truth_stream = RngStream(config.master_seed, TRUTH_STREAM_ID)
    for lam_index, lam in enumerate(config.lambdas):
        totals = simulate_totals(
            PortfolioSpec.from_lambda(lam), config.true_spec, config.truth_m,
            truth_stream.child(lam_index),
        )
        for eps in config.epsilons:
            truth[("reserve", eps, lam)] = reserve(totals, eps)

    indices = range(config.num_replications)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            replications = list(pool.map(lambda k: _replicate(config, k, settings), indices))
    else:
        replications = []
        for k in indices:
            replications.append(_replicate(config, k, settings))
            if progress and (k + 1) % 10 == 0:
                print(f"replication {k + 1}/{config.num_replications}", file=sys.stderr)

    cells: dict[tuple[FamilyKind, Target], CellStats] = {}
    fit_failures: dict[FamilyKind, int] = {}
    for kind in config.fitted_kinds:
        fit_failures[kind] = sum(1 for _, failed in replications if kind in failed)
        for target in config.targets():
            errors = [
                estimates[(kind, target)] - truth[target]
                for estimates, failed in replications
                if kind not in failed
            ]
            n_success = len(errors)
            if n_success:
                arr = np.asarray(errors)
                stats = CellStats(
                    bias=float(arr.mean()),
                    rmse=float(sqrt(np.mean(arr**2))),
                    n_success=n_success,
                    n_failed=config.num_replications - n_success,
                )
            else:
                stats = CellStats(float("nan"), float("nan"), 0, config.num_replications)
            cells[(kind, target)] = stats
    return StudyResult(config=config, truth=truth, cells=cells, fit_failures=fit_failures)


# ---------------------------------------------------------------------------
# Tabular output
# ---------------------------------------------------------------------------


def _format(value: float) -> str:
    if value != value:  # NaN sentinel for empty cells
        return "NA"
    return f"{value:.12g}"


def _column_map(results) -> dict[str, StudyResult]:
    if isinstance(results, StudyResult):
        label = FAMILY_LABELS[results.config.true_spec.kind]
        return {label: results}
    return dict(results)


def _target_title(target: Target) -> str:
    if target[0] == "quantile":
        return f"upper {100 * (1 - target[1]):g}% quantile of the severity distribution"
    return f"upper {100 * (1 - target[1]):g}% reserve at lambda={target[2]:g}"


def study_csv(results, target: Target) -> str:
    """CSV rendering: a bias block above an RMSE block, one row per applied family."""
    columns = _column_map(results)
    labels = list(columns)
    lines = ["block,A\\T," + ",".join(labels)]
    for block in ("bias", "rmse"):
        for kind in FAMILY_ORDER:
            if not any((kind, target) in res.cells for res in columns.values()):
                continue
            row = [block, FAMILY_LABELS[kind]]
            for res in columns.values():
                stats = res.cells.get((kind, target))
                row.append(_format(getattr(stats, block)) if stats else "NA")
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def emit_table(results, target: Target) -> str:
    """Aligned text rendering with the same cells as :func:`study_csv`."""
    columns = _column_map(results)
    labels = list(columns)
    cells = {
        (kind, label, block): _format(getattr(res.cells[(kind, target)], block))
        for label, res in columns.items()
        for kind in FAMILY_ORDER
        if (kind, target) in res.cells
        for block in ("bias", "rmse")
    }
    width = max([len(s) for s in cells.values()] + [len(lbl) for lbl in labels] + [6]) + 2
    out = [f"Target: {_target_title(target)}"]
    for block, title in (("bias", "Bias"), ("rmse", "RMSE")):
        out.append(title)
        out.append("A\\T".ljust(10) + "".join(lbl.rjust(width) for lbl in labels))
        for kind in FAMILY_ORDER:
            if not any((kind, target) in res.cells for res in columns.values()):
                continue
            row = FAMILY_LABELS[kind].ljust(10)
            for label in labels:
                row += cells.get((kind, label, block), "NA").rjust(width)
            out.append(row)
    return "\n".join(out) + "\n"
