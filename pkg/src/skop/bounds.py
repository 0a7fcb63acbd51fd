"""Right-hand sides of the reconstruction-error estimates.

Two estimates are evaluated against measured errors:

* the modular estimate, whose four terms are
    ||L||_1 / (3 delta m0) * omega_eta(f, 1/w^alpha)
  + M1 * I_eta[lam0 f] / (3 delta m0) * w^(-alpha0)     [absent: compact L]
  + Delta / (3 delta) * omega_eta(f, Delta/w)
  + I_phi[lam0 f] / 3 * w^(-theta0);

* the L^p estimate, whose three terms are
    delta^(-1/p) (2 m0)^((p-1)/p) (||L||_1 + M_p)^(1/p) * omega_p(f, 1/w)
  + delta^(-1/p) m0 Delta^(1/p) * omega_p(f, Delta/w)
  + M2 ||f||_p w^(-theta0).                              [absent: linear case]

Exact constant reproduction (partition of unity, linear case) makes the
rate term vanish for every exponent; this is encoded as rate_exponent =
inf / rate_coeff = 0.  The scale mu multiplying the measured modular comes
from the constructive recipe in `proof_constants`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import MomentConditionError, NumericError
from .phi import HTriple


def _rate_power(w: float, exponent: float) -> float:
    if math.isinf(exponent):
        return 0.0
    return w**-exponent


@dataclass(frozen=True)
class ModularBoundInputs:
    """Measured constants feeding the modular estimate.

    tail_coeff=None selects the compact-support variant (no tail term).
    mu and lambda0 are carried for reporting only: mu scales the measured
    modular, it does not enter the right-hand side.
    """

    kernel_l1: float
    gap_lo: float
    gap_hi: float
    moment0: float
    omega_small: float
    omega_large: float
    modular_eta: float
    modular_phi: float
    rate_exponent: float
    w: float
    split_alpha: float
    tail_coeff: float | None = None
    tail_exponent: float | None = None
    mu: float | None = None
    lambda0: float | None = None

    def __post_init__(self):
        if not 0 < self.split_alpha < 1:
            raise NumericError(f"splitting exponent must lie in (0,1), got {self.split_alpha}")
        for name in (
            "kernel_l1",
            "gap_lo",
            "gap_hi",
            "moment0",
            "omega_small",
            "omega_large",
            "modular_eta",
            "modular_phi",
            "w",
        ):
            if getattr(self, name) < 0:
                raise NumericError(f"{name} must be nonnegative")
        if self.gap_lo == 0:
            raise NumericError("gap_lo must be positive")
        if self.tail_coeff is not None and self.tail_exponent is None:
            raise NumericError("tail_coeff requires tail_exponent")


def modular_bound_terms(inp: ModularBoundInputs) -> tuple[float, float, float, float]:
    if inp.moment0 <= 0:
        raise NumericError("moment0 must be positive")
    scale = 3.0 * inp.gap_lo * inp.moment0
    t1 = inp.kernel_l1 / scale * inp.omega_small
    if inp.tail_coeff is None:
        t2 = 0.0
    else:
        t2 = inp.tail_coeff * inp.modular_eta / scale * _rate_power(inp.w, inp.tail_exponent)
    t3 = inp.gap_hi / (3.0 * inp.gap_lo) * inp.omega_large
    t4 = inp.modular_phi / 3.0 * _rate_power(inp.w, inp.rate_exponent)
    return t1, t2, t3, t4


def modular_bound_rhs(inp: ModularBoundInputs) -> float:
    return sum(modular_bound_terms(inp))


@dataclass(frozen=True)
class LpBoundInputs:
    """Measured constants feeding the L^p estimate; moment_p must be finite."""

    p: float
    gap_lo: float
    gap_hi: float
    moment0: float
    kernel_l1: float
    moment_p: float
    omega_small: float
    omega_large: float
    rate_coeff: float
    rate_exponent: float
    f_norm: float
    w: float

    def __post_init__(self):
        if self.p < 1:
            raise NumericError(f"norm exponent must be >= 1, got {self.p}")
        if self.gap_lo <= 0:
            raise NumericError("gap_lo must be positive")
        for name in (
            "gap_hi",
            "moment0",
            "kernel_l1",
            "omega_small",
            "omega_large",
            "rate_coeff",
            "f_norm",
            "w",
        ):
            if getattr(self, name) < 0:
                raise NumericError(f"{name} must be nonnegative")


def lp_bound_terms(inp: LpBoundInputs) -> tuple[float, float, float]:
    if math.isinf(inp.moment_p):
        raise MomentConditionError(
            f"moment condition violated: continuous moment of order {inp.p:g} is infinite"
        )
    p = inp.p
    t1 = (
        inp.gap_lo ** (-1.0 / p)
        * (2.0 * inp.moment0) ** ((p - 1.0) / p)
        * (inp.kernel_l1 + inp.moment_p) ** (1.0 / p)
        * inp.omega_small
    )
    t2 = inp.gap_lo ** (-1.0 / p) * inp.moment0 * inp.gap_hi ** (1.0 / p) * inp.omega_large
    t3 = inp.rate_coeff * inp.f_norm * _rate_power(inp.w, inp.rate_exponent)
    return t1, t2, t3


def lp_bound_rhs(inp: LpBoundInputs) -> float:
    return sum(lp_bound_terms(inp))


def lip_rate_bound(inp: LpBoundInputs, alpha: float, c1: float) -> float:
    """The estimate with omega_p(f, t) replaced by its class bound C1 * t^alpha."""
    if not 0 < alpha <= 1:
        raise NumericError(f"smoothness exponent must lie in (0, 1], got {alpha}")
    if c1 < 0:
        raise NumericError("C1 must be nonnegative")
    subst = replace(
        inp,
        omega_small=c1 * (1.0 / inp.w) ** alpha,
        omega_large=c1 * (inp.gap_hi / inp.w) ** alpha,
    )
    return lp_bound_rhs(subst)


@dataclass(frozen=True)
class ComparisonResult:
    holds: bool
    slack: float


def compare(measured: float, bound: float) -> ComparisonResult:
    """Does the measurement respect the bound (with 1e-9 relative grace)?"""
    if measured < 0 or bound < 0:
        raise NumericError("compare expects nonnegative values")
    holds = measured <= bound * (1.0 + 1e-9)
    slack = math.inf if measured == 0 else bound / measured
    return ComparisonResult(holds=holds, slack=slack)


@dataclass(frozen=True)
class RecipeConstants:
    """Constructive constants for the modular comparison.

    lam is the internal scale of the compatibility inequality (strictly
    below min{1, lambda0/2}); c_lam its companion constant; mu the scale
    applied to the measured modular.
    """

    lambda0: float
    lam: float
    c_lam: float
    mu: float


def proof_constants(
    triple: HTriple, lambda0: float, moment0: float, rate_coeff: float
) -> RecipeConstants:
    """mu = min{C_lam / (3 m0), lambda0 / (3 M2)} with lam = min{1, lambda0/2} / 2."""
    if lambda0 <= 0:
        raise NumericError("lambda0 must be positive")
    if moment0 <= 0:
        raise NumericError("moment0 must be positive")
    lam = min(1.0, lambda0 / 2.0) / 2.0
    c_lam = float(triple.c_lambda(lam))
    if not 0 < c_lam < 1:
        raise NumericError(f"C_lambda outside (0,1): {c_lam}")
    mu = c_lam / (3.0 * moment0)
    if rate_coeff > 0:
        mu = min(mu, lambda0 / (3.0 * rate_coeff))
    return RecipeConstants(lambda0=lambda0, lam=lam, c_lam=c_lam, mu=mu)
