"""Special-case mapping tests: exact rows and boundary limits.

The oracle for every row is a Kolmogorov-Smirnov comparison between draws
from the mapped parameter vector and the closed-form target law.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from powerburr import (
    DomainError,
    ParamVector,
    RngStream,
    SpecialCase,
    UnsupportedKindError,
    draw_powerburr,
    draw_special_case,
    special_case_cdf,
    special_case_params,
)

N_KS = 100_000

# (case, target parameters) covering all ten rows
CASES: list[tuple[SpecialCase, dict]] = [
    (SpecialCase.BURR, dict(a=3.0, c=2.0, b=1.5)),
    (SpecialCase.PARETO, dict(a=3.0, b=2.0)),
    (SpecialCase.GAMMA, dict(c=2.0, b=0.5)),
    (SpecialCase.INVERSE_GAMMA, dict(a=3.0, b=2.0)),
    (SpecialCase.LOG_GAMMA, dict(c=5.0, b=0.75)),
    (SpecialCase.LOGISTIC, dict(b=2.0)),
    (SpecialCase.LOG_LOGISTIC, dict(a=2.0, b=1.5)),
    (SpecialCase.WEIBULL, dict(a=0.5, b=1.13)),
    (SpecialCase.FRECHET, dict(a=2.0, b=1.0)),
    (SpecialCase.LOG_NORMAL, dict(xi=-0.5, sigma=1.0)),
]


def test_burr_row_is_exact():
    assert special_case_params(SpecialCase.BURR, a=2.0, b=3.0, c=1.5) == ParamVector(
        2.0, 1.5, 3.0, 1.0, 1.0, 1.0
    )


def test_pareto_row_scale():
    # matching survival (1+z/b)^-a forces beta = b/a, since the theta=1 ratio
    # variable itself carries scale alpha
    phi = special_case_params(SpecialCase.PARETO, a=3.0, b=2.0)
    assert phi == ParamVector(3.0, 1.0, 2.0 / 3.0, 1.0, 1.0, 1.0)
    # distributional check at modest sample size
    z = draw_powerburr(RngStream(41, 0), phi, N_KS)
    d = stats.kstest(z, lambda t: special_case_cdf(SpecialCase.PARETO, t, a=3.0, b=2.0)).statistic
    assert d < 0.01


def test_log_gamma_row_links_tau_to_gamma():
    phi = special_case_params(SpecialCase.LOG_GAMMA, c=5.0, b=0.75, limit_magnitude=1e6)
    assert phi.alpha == 1e6 and phi.gamma == 1e6
    assert phi.tau == pytest.approx(phi.gamma / 0.75)
    assert phi.beta == 1.0


def test_log_normal_row_orders_alpha_above_theta():
    phi = special_case_params(SpecialCase.LOG_NORMAL, xi=-0.5, sigma=1.0, limit_magnitude=1e4)
    assert phi.alpha == pytest.approx(phi.theta**2)
    assert phi.tau == pytest.approx(np.sqrt(phi.theta))
    assert phi.gamma == pytest.approx(phi.theta)

    # the surrogate's beta must stay a positive normal float even at the
    # default magnitude, where sigma*sqrt(theta) is capped
    capped = special_case_params(SpecialCase.LOG_NORMAL, xi=-0.5, sigma=1.0)
    assert capped.beta > 0.0


@pytest.mark.parametrize("case,target", CASES, ids=[c.value for c, _ in CASES])
def test_limit_laws_pass_ks(case, target):
    phi = special_case_params(case, **target)
    z = draw_powerburr(RngStream(2026, 11).child(hash(case.value) % 1000), phi, N_KS)
    d = stats.kstest(z, lambda t: special_case_cdf(case, t, **target)).statistic
    assert d < 0.02, f"{case.value}: KS={d:.4f}"


@pytest.mark.parametrize("case,target", CASES, ids=[c.value for c, _ in CASES])
def test_reference_samplers_match_reference_cdfs(case, target):
    # the two oracle halves (closed-form CDF, exact sampler) agree with
    # each other, independently of the transform machinery
    z = draw_special_case(RngStream(5150, 2).generator(), case, N_KS, **target)
    d = stats.kstest(z, lambda t: special_case_cdf(case, t, **target)).statistic
    assert d < 0.01, f"{case.value}: KS={d:.4f}"


def test_two_sample_gamma_example():
    phi = special_case_params(SpecialCase.GAMMA, c=2.0, b=0.5, limit_magnitude=1e6)
    z = draw_powerburr(RngStream(7, 1), phi, N_KS)
    direct = draw_special_case(RngStream(7, 2).generator(), SpecialCase.GAMMA, N_KS, c=2.0, b=0.5)
    d = stats.ks_2samp(z, direct).statistic
    assert d < 0.01


def test_reciprocal_symmetry_of_ratio():
    # 1/X for X ~ ratio(alpha, theta) is distributed as ratio(theta, alpha)
    alpha, theta = 3.0, 2.0
    rng = RngStream(99, 0).generator()
    x = rng.gamma(theta, 1 / theta, N_KS) / rng.gamma(alpha, 1 / alpha, N_KS)
    y = rng.gamma(alpha, 1 / alpha, N_KS) / rng.gamma(theta, 1 / theta, N_KS)
    d = stats.ks_2samp(1.0 / x, y).statistic
    assert d < 0.01


def test_missing_parameters_rejected():
    with pytest.raises(DomainError, match="missing"):
        special_case_params(SpecialCase.PARETO, a=3.0)
    with pytest.raises(DomainError, match="limit_magnitude"):
        special_case_params(SpecialCase.GAMMA, c=2.0, b=1.0, limit_magnitude=0.5)


def test_unknown_kind_rejected():
    with pytest.raises(UnsupportedKindError):
        special_case_params("pareto", a=3.0, b=2.0)  # type: ignore[arg-type]
