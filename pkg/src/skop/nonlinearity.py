"""Families {g_w} defining the nonlinear part of the operator.

Each family must send 0 to 0 and carry a gauge psi certifying
|g_w(u) - g_w(v)| <= psi(|u - v|).  The constant-reproduction defect
T_w = sup_{u != 0} |g_w(u)/u * (sum of kernel translates) - 1| decays like
w^(-theta0); `fit_rate_certificate` turns measured T_w samples into the
explicit constants (theta0, M2) with M2 inflated to dominate every sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NumericError
from .phi import PhiFunction, power


@dataclass(frozen=True)
class Nonlinearity:
    """A family g_w with its declared Lipschitz majorant psi."""

    name: str
    fn: Callable[[float, np.ndarray], np.ndarray]
    psi: PhiFunction
    params: dict = field(default_factory=dict)

    def eval(self, w: float, u):
        if w <= 0:
            raise ConfigError(f"scale w must be positive, got {w}")
        arr = np.asarray(u, dtype=float)
        out = np.asarray(self.fn(w, arr), dtype=float)
        if np.ndim(u) == 0:
            return float(out)
        return out


def identity_family() -> Nonlinearity:
    """g_w(u) = u; the linear case, psi(u) = u with equality."""
    return Nonlinearity(name="identity", fn=lambda w, u: u, psi=power(1.0))


def _sqrt_capped(u):
    u = np.asarray(u, dtype=float)
    return np.where(u <= 1.0, np.sqrt(np.maximum(u, 0.0)), u)


def power_family(a: float) -> Nonlinearity:
    """g_w(u) = u^(1 - 1/w) on (a, 1), identity elsewhere; 0 < a < 1/e.

    The formula jumps at u = a (a^(1-1/w) != a); it is evaluated exactly as
    written with the open branch (a, 1).  The declared majorant is
    psi(u) = sqrt(u) for u <= 1 and u above; pairs straddling the jump can
    exceed it and the spot check reports them instead of hiding them.
    """
    if not 0 < a < 1.0 / math.e:
        raise ConfigError(f"power family parameter must lie in (0, 1/e), got {a}")

    def g(w, u):
        out = np.array(u, dtype=float, copy=True)
        mask = (out > a) & (out < 1.0)
        out[mask] = out[mask] ** (1.0 - 1.0 / w)
        return out

    psi = PhiFunction(name="sqrt_capped", fn=_sqrt_capped, is_convex=False)
    return Nonlinearity(name=f"power({a:g})", fn=g, psi=psi, params={"a": a})


def make_nonlinearity(family: str, *args: float) -> Nonlinearity:
    if family == "identity":
        if args:
            raise ConfigError("identity takes no parameters")
        return identity_family()
    if family == "power":
        if len(args) != 1:
            raise ConfigError("power takes one parameter")
        return power_family(args[0])
    raise ConfigError(f"unknown nonlinearity '{family}'")


@dataclass(frozen=True)
class PsiLipschitzReport:
    checked: int
    violations: int
    max_ratio: float
    worst: tuple


def check_psi_lipschitz(
    g: Nonlinearity,
    ws: Sequence[float],
    us: np.ndarray,
    vs: np.ndarray,
    slack: float = 1e-10,
) -> PsiLipschitzReport:
    """Spot-check |g_w(u) - g_w(v)| <= psi(|u - v|) on the given triples.

    Violations are counted and the worst triple returned; nothing raises,
    certification pipelines report the outcome as data.
    """
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)
    checked = 0
    violations = 0
    max_ratio = 0.0
    worst = ()
    for w in ws:
        keep = us != vs
        u, v = us[keep], vs[keep]
        lhs = np.abs(g.eval(w, u) - g.eval(w, v))
        rhs = np.asarray(g.psi(np.abs(u - v)), dtype=float)
        ratio = lhs / rhs
        checked += int(u.size)
        bad = lhs > rhs * (1.0 + slack)
        violations += int(bad.sum())
        idx = int(np.argmax(ratio))
        if ratio[idx] > max_ratio:
            max_ratio = float(ratio[idx])
            worst = (float(w), float(u[idx]), float(v[idx]))
    return PsiLipschitzReport(
        checked=checked, violations=violations, max_ratio=max_ratio, worst=worst
    )


def t_w_product(
    g: Nonlinearity, unity_defect: float, w: float, u_grid: np.ndarray
) -> float:
    """Constant-reproduction defect for product kernels, factored form.

    With an exact partition of unity this is sup over the grid of
    |g_w(u)/u - 1|; a nonzero unity defect widens it conservatively to
    sup |g_w(u)/u * (1 +- defect) - 1|.
    """
    u = np.asarray(u_grid, dtype=float)
    if np.any(u == 0.0):
        raise NumericError("u grid must not contain 0")
    if unity_defect < 0:
        raise NumericError("unity defect must be nonnegative")
    base = g.eval(w, u) / u
    if unity_defect == 0.0:
        return float(np.abs(base - 1.0).max())
    up = np.abs(base * (1.0 + unity_defect) - 1.0)
    dn = np.abs(base * (1.0 - unity_defect) - 1.0)
    return float(np.maximum(up, dn).max())


@dataclass(frozen=True)
class RateCertificate:
    """Measured model T_w <= coefficient * w^(-exponent), samples attached."""

    exponent: float
    coefficient: float
    samples: tuple
    exact_zero: bool = False


def fit_rate_certificate(samples: Sequence[tuple[float, float]]) -> RateCertificate:
    """Least-squares log-log fit of T_w samples, coefficient inflated to dominate.

    An all-zero ladder (exact constant reproduction) short-circuits to an
    infinite exponent and zero coefficient.
    """
    samples = tuple((float(w), float(t)) for w, t in samples)
    if any(t < 0 for _, t in samples):
        raise NumericError("negative defect sample")
    if all(t == 0.0 for _, t in samples):
        return RateCertificate(
            exponent=math.inf, coefficient=0.0, samples=samples, exact_zero=True
        )
    positives = [(w, t) for w, t in samples if t > 0]
    if len(positives) < 4:
        raise NumericError("need at least 4 positive samples to fit a rate")
    ws = np.array([w for w, _ in positives])
    if ws.max() / ws.min() < 10.0 - 1e-9:
        raise NumericError("samples must span at least one decade in w")
    slope, intercept = np.polyfit(np.log(ws), np.log([t for _, t in positives]), 1)
    coeff = math.exp(intercept)
    inflate = max(t / (coeff * w**slope) for w, t in positives)
    return RateCertificate(
        exponent=float(-slope), coefficient=float(coeff * inflate), samples=samples
    )
