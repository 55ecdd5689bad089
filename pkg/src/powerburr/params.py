"""Parameter vectors, family specifications and shared exceptions.

Parameter conventions
---------------------
``ParamVector`` holds the six transform parameters in the order
``(alpha, theta, beta, tau, gamma, eta)``:

* ``alpha``  Gamma shape of the denominator variable,
* ``theta``  Gamma shape of the numerator variable,
* ``beta``   scale, in currency units,
* ``tau``    shift inside the power transform,
* ``gamma``  outer power,
* ``eta``    inner power.

The five-parameter variant is represented by ``eta == 1`` exactly, and the
plain Burr core by ``tau == gamma == eta == 1``.

``FamilySpec`` covers the ten claim-severity families of the simulation
study.  Parameter tuples use the following layouts (matching the study's
reference parameter choices in parentheses):

=================  =====================================  ==================
kind               params                                 reference values
=================  =====================================  ==================
LOG_NORMAL         (xi, sigma)                            (-0.5, 1)
LOG_GAMMA          (scale, shape)                         (0.75, 5)
WEIBULL            (shape, scale)                         (2, 1.13)
PARETO             (shape, scale)                         (3, 2)
GAMMA              (mean, shape)                          (1, 2)
EXTENDED_PARETO    (alpha, theta, beta)                   (3, 2, 1)
FOUR_PARAM         (alpha, theta, beta, eta)              (4, 2, 0.6, 1.3)
FIVE_PARAM         (alpha, theta, beta, tau, gamma)       (4, 2, 2.7, 5, 1.3)
FIVE_PARAM2        (alpha, theta, beta, eta, gamma)       (4, 2, 0.5, 1.2, 1.1)
SIX_PARAM          (alpha, theta, beta, tau, gamma, eta)  (4, 2, 4, 10, 1.2, 1.3)
=================  =====================================  ==================

LOG_GAMMA means ``log(1 + Z) ~ Gamma`` with unit-mean shape ``shape`` scaled
by ``scale``; WEIBULL uses the survival function ``exp(-(z/scale)**shape)``;
PARETO the survival function ``(1 + z/scale)**-shape``; GAMMA has the given
mean and shape.  FOUR_PARAM fixes ``tau = gamma = 1``, FIVE_PARAM fixes
``eta = 1`` and FIVE_PARAM2 fixes ``tau = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """A computation lost meaning through overflow or underflow."""


class UnsupportedKindError(ValueError):
    """A family or special-case kind is not recognised."""


class ConvergenceError(RuntimeError):
    """An iterative numerical search exhausted its iteration budget."""


class FitError(RuntimeError):
    """Every optimisation start failed; carries per-start diagnostics."""

    def __init__(self, message: str, diagnostics: list[str] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


@dataclass(frozen=True)
class ParamVector:
    """The six transform parameters ``(alpha, theta, beta, tau, gamma, eta)``."""

    alpha: float
    theta: float
    beta: float
    tau: float = 1.0
    gamma: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "theta", "beta", "tau", "gamma", "eta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a finite positive real, got {value!r}")

    @property
    def is_five_param(self) -> bool:
        return self.eta == 1.0

    @property
    def is_pure_burr(self) -> bool:
        return self.tau == 1.0 and self.gamma == 1.0 and self.eta == 1.0

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.alpha, self.theta, self.beta, self.tau, self.gamma, self.eta)

    @classmethod
    def from_tuple(cls, values) -> ParamVector:
        return cls(*map(float, values))


class FamilyKind(enum.Enum):
    """The ten claim-severity families of the simulation study."""

    LOG_NORMAL = "log_normal"
    LOG_GAMMA = "log_gamma"
    WEIBULL = "weibull"
    PARETO = "pareto"
    GAMMA = "gamma"
    EXTENDED_PARETO = "extended_pareto"
    FOUR_PARAM = "four_param"
    FIVE_PARAM = "five_param"
    FIVE_PARAM2 = "five_param2"
    SIX_PARAM = "six_param"


#: Row order used in all tabular study output.
FAMILY_ORDER: tuple[FamilyKind, ...] = (
    FamilyKind.LOG_NORMAL,
    FamilyKind.LOG_GAMMA,
    FamilyKind.WEIBULL,
    FamilyKind.PARETO,
    FamilyKind.GAMMA,
    FamilyKind.EXTENDED_PARETO,
    FamilyKind.FOUR_PARAM,
    FamilyKind.FIVE_PARAM,
    FamilyKind.FIVE_PARAM2,
    FamilyKind.SIX_PARAM,
)

#: Display labels for tabular output, in FAMILY_ORDER.
FAMILY_LABELS: dict[FamilyKind, str] = {
    FamilyKind.LOG_NORMAL: "L-N",
    FamilyKind.LOG_GAMMA: "L-G",
    FamilyKind.WEIBULL: "We",
    FamilyKind.PARETO: "Pa",
    FamilyKind.GAMMA: "Ga",
    FamilyKind.EXTENDED_PARETO: "E. Pa.",
    FamilyKind.FOUR_PARAM: "4-par.",
    FamilyKind.FIVE_PARAM: "5-par.",
    FamilyKind.FIVE_PARAM2: "5-par. 2",
    FamilyKind.SIX_PARAM: "6-par",
}

PARAM_NAMES: dict[FamilyKind, tuple[str, ...]] = {
    FamilyKind.LOG_NORMAL: ("xi", "sigma"),
    FamilyKind.LOG_GAMMA: ("scale", "shape"),
    FamilyKind.WEIBULL: ("shape", "scale"),
    FamilyKind.PARETO: ("shape", "scale"),
    FamilyKind.GAMMA: ("mean", "shape"),
    FamilyKind.EXTENDED_PARETO: ("alpha", "theta", "beta"),
    FamilyKind.FOUR_PARAM: ("alpha", "theta", "beta", "eta"),
    FamilyKind.FIVE_PARAM: ("alpha", "theta", "beta", "tau", "gamma"),
    FamilyKind.FIVE_PARAM2: ("alpha", "theta", "beta", "eta", "gamma"),
    FamilyKind.SIX_PARAM: ("alpha", "theta", "beta", "tau", "gamma", "eta"),
}

#: Families whose density is the transformed Burr density.
BURR_KINDS = frozenset(
    {
        FamilyKind.EXTENDED_PARETO,
        FamilyKind.FOUR_PARAM,
        FamilyKind.FIVE_PARAM,
        FamilyKind.FIVE_PARAM2,
        FamilyKind.SIX_PARAM,
    }
)


@dataclass(frozen=True)
class FamilySpec:
    """A tagged family choice with its parameter tuple.

    Parameters are validated against the layout table in the module
    docstring: arity must match the kind and every entry must be a finite
    positive real, except the log-normal location ``xi`` which may be any
    finite real.
    """

    kind: FamilyKind
    params: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.kind, FamilyKind):
            raise UnsupportedKindError(f"unknown family kind {self.kind!r}")
        names = PARAM_NAMES[self.kind]
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if len(params) != len(names):
            raise DomainError(
                f"{self.kind.value} expects {len(names)} parameters {names}, got {len(params)}"
            )
        for name, value in zip(names, params):
            if not math.isfinite(value):
                raise DomainError(f"{self.kind.value} parameter {name} must be finite")
            if value <= 0 and not (self.kind is FamilyKind.LOG_NORMAL and name == "xi"):
                raise DomainError(f"{self.kind.value} parameter {name} must be positive, got {value}")

    def named_params(self) -> dict[str, float]:
        return dict(zip(PARAM_NAMES[self.kind], self.params))

    def to_param_vector(self) -> ParamVector:
        """Embed a Burr-transform family into the full six-parameter vector.

        Raises ``UnsupportedKindError`` for the classical two-parameter
        families, which are limits of the transform rather than members.
        """
        p = self.named_params()
        if self.kind is FamilyKind.EXTENDED_PARETO:
            return ParamVector(p["alpha"], p["theta"], p["beta"], 1.0, 1.0, 1.0)
        if self.kind is FamilyKind.FOUR_PARAM:
            return ParamVector(p["alpha"], p["theta"], p["beta"], 1.0, 1.0, p["eta"])
        if self.kind is FamilyKind.FIVE_PARAM:
            return ParamVector(p["alpha"], p["theta"], p["beta"], p["tau"], p["gamma"], 1.0)
        if self.kind is FamilyKind.FIVE_PARAM2:
            return ParamVector(p["alpha"], p["theta"], p["beta"], 1.0, p["gamma"], p["eta"])
        if self.kind is FamilyKind.SIX_PARAM:
            return ParamVector(*self.params)
        raise UnsupportedKindError(f"{self.kind.value} is not a transform family")

    @classmethod
    def from_param_vector(cls, kind: FamilyKind, phi: ParamVector) -> FamilySpec:
        """Project a full parameter vector onto a transform family's layout."""
        if kind is FamilyKind.EXTENDED_PARETO:
            return cls(kind, (phi.alpha, phi.theta, phi.beta))
        if kind is FamilyKind.FOUR_PARAM:
            return cls(kind, (phi.alpha, phi.theta, phi.beta, phi.eta))
        if kind is FamilyKind.FIVE_PARAM:
            return cls(kind, (phi.alpha, phi.theta, phi.beta, phi.tau, phi.gamma))
        if kind is FamilyKind.FIVE_PARAM2:
            return cls(kind, (phi.alpha, phi.theta, phi.beta, phi.eta, phi.gamma))
        if kind is FamilyKind.SIX_PARAM:
            return cls(kind, phi.as_tuple())
        raise UnsupportedKindError(f"{kind.value} is not a transform family")


class UnimodalityCondition(enum.Enum):
    """Which sufficient condition certified a density as unimodal."""

    GAMMA_GE_ONE = "gamma_ge_one"
    THETA_GE_ONE = "theta_ge_one"
    ALGEBRAIC = "algebraic"
    NOT_GUARANTEED = "not_guaranteed"


@dataclass(frozen=True)
class UnimodalityVerdict:
    is_guaranteed_unimodal: bool
    condition_used: UnimodalityCondition


@dataclass(frozen=True)
class DensityPoint:
    """A density evaluation carrying the back-transformed coordinate."""

    z: float
    x: float
    log_density: float
