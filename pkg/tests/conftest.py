"""Shared fixtures and reference parameter sets for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from powerburr import FamilyKind, FamilySpec

#: The ten reference severity distributions of the simulation study, with
#: their documented mean and standard deviation (see params module docstring
#: for the parameter layouts).
STUDY_SPECS: dict[FamilyKind, FamilySpec] = {
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


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260809)
