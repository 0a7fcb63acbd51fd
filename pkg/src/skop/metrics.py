"""L^p norms, the integral modulus of smoothness, and rate fitting.

The modulus here is the L^p one: sup over |h| <= delta of the p-norm of
f(. + h) - f(.).  Unlike its sup-norm cousin it satisfies
omega_p(f, lam * delta) <= (1 + lam) * omega_p(f, delta), which the rate
estimates rely on, and for bounded-variation signals it scales like delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, NumericError
from .phi import shift_grid
from .quadrature import DEFAULT_CELLS, nodes_weights

NORM_STABLE_REL = 1e-8


@dataclass(frozen=True)
class NormResult:
    p: float
    value: float
    domain: tuple[float, float]
    quadrature_cells: int
    stable: bool


def _as_callable(diff):
    if callable(diff):
        return diff, tuple(getattr(diff, "kinks", ()))
    f, g = diff
    kinks = tuple(getattr(f, "kinks", ())) + tuple(getattr(g, "kinks", ()))
    return (lambda x: f(x) - g(x)), kinks


def lp_norm(
    diff,
    p: float,
    domain: Sequence[float],
    cells: int = DEFAULT_CELLS,
    breakpoints: Sequence[float] = (),
) -> NormResult:
    """(integral over domain of |diff|^p)^(1/p) by composite Simpson.

    ``diff`` may be a callable or a (signal, signal) pair, whose declared
    kinks are added to the breakpoints.  The integral is recomputed at
    doubled resolution to set the ``stable`` flag; the returned value uses
    the requested resolution.
    """
    if p < 1:
        raise ConfigError(f"norm exponent must be >= 1, got {p}")
    fn, kinks = _as_callable(diff)
    bps = tuple(breakpoints) + kinks
    a, b = float(domain[0]), float(domain[1])

    def power_integral(c: int) -> float:
        nodes, weights = nodes_weights(a, b, c, bps)
        return float(np.dot(weights, np.abs(np.asarray(fn(nodes), dtype=float)) ** p))

    base = power_integral(cells)
    fine = power_integral(2 * cells)
    stable = abs(fine - base) <= NORM_STABLE_REL * (1.0 + abs(fine))
    return NormResult(
        p=float(p),
        value=base ** (1.0 / p),
        domain=(a, b),
        quadrature_cells=cells,
        stable=stable,
    )


def omega_p(
    f,
    delta: float,
    p: float,
    domain: Sequence[float] | None = None,
    shift_count: int = 33,
    cells: int = DEFAULT_CELLS,
) -> float:
    """sup over the shift grid |h| <= delta of ||f(. + h) - f(.)||_p.

    The integration window is the domain inflated by delta so shifted mass
    is never clipped; shifts re-evaluate the analytic signal.
    """
    if delta <= 0:
        raise NumericError(f"shift radius must be positive, got {delta}")
    if domain is None:
        lo, hi = f.support
    else:
        lo, hi = float(domain[0]), float(domain[1])
    lo, hi = lo - delta, hi + delta
    kinks = tuple(getattr(f, "kinks", ()))
    best = 0.0
    for h in shift_grid(delta, shift_count):
        if h == 0.0:
            continue
        bps = kinks + tuple(k - h for k in kinks)
        res = lp_norm(lambda x: f(x + h) - f(x), p, (lo, hi), cells, bps)
        best = max(best, res.value)
    return best


@dataclass(frozen=True)
class LipschitzCertificate:
    alpha: float
    p: float
    c1: float
    passed: bool
    deltas: tuple
    ratios: tuple


def certify_lipschitz(
    f,
    alpha: float,
    p: float,
    delta_ladder: Sequence[float],
    domain: Sequence[float] | None = None,
    growth_cap: float = 10.0,
) -> LipschitzCertificate:
    """Empirical smoothness-class certificate: is omega_p(f, d) = O(d^alpha)?

    Computes omega_p(f, d) / d^alpha down the ladder.  C1 is the largest
    ratio.  The certificate passes when no ratio grows by more than
    ``growth_cap`` relative to the coarsest scale -- decaying ratios mean f
    is smoother than declared, which still certifies membership.
    """
    if not 0 < alpha <= 1:
        raise ConfigError(f"smoothness exponent must lie in (0, 1], got {alpha}")
    deltas = sorted((float(d) for d in delta_ladder), reverse=True)
    if len(deltas) < 3 or deltas[-1] <= 0:
        raise ConfigError("delta ladder must hold >= 3 positive entries")
    if math.log10(deltas[0] / deltas[-1]) < 2 - 1e-9:
        raise ConfigError("delta ladder must span at least 2 decades")
    ratios = tuple(omega_p(f, d, p, domain) / d**alpha for d in deltas)
    growth = max(ratios) / ratios[0]
    return LipschitzCertificate(
        alpha=alpha,
        p=float(p),
        c1=max(ratios),
        passed=growth < growth_cap,
        deltas=tuple(deltas),
        ratios=ratios,
    )


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple


def fit_rate(points: Sequence[tuple[float, float]]) -> RateFit:
    """Least squares on (log w, log error); errors must be positive."""
    pts = tuple((float(w), float(e)) for w, e in points)
    if len(pts) < 4:
        raise NumericError("need at least 4 points to fit a rate")
    if any(e <= 0 for _, e in pts):
        raise NumericError("rate fit requires positive errors")
    ordered = sorted(pts)
    lw = np.log([w for w, _ in ordered])
    le = np.log([e for _, e in ordered])
    slope, intercept = np.polyfit(lw, le, 1)
    resid = le - (slope * lw + intercept)
    total = le - le.mean()
    ss_tot = float(np.dot(total, total))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.dot(resid, resid)) / ss_tot
    return RateFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=min(max(r2, 0.0), 1.0),
        points=pts,
    )
