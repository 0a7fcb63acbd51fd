"""Convex gauge functions, Orlicz modulars and the Orlicz modulus of continuity.

A gauge ("phi-function") is continuous, vanishes at 0, is nondecreasing,
positive for u > 0 and unbounded.  The modular of a sampled function f at
scale lam is the quadrature value of integral phi(lam * |f|).  L^p is the
special case phi(u) = u^p, where the modular equals ||f||_p^p.

The compatibility check `check_H` links the space's gauge phi, a kernel's
Lipschitz majorant psi and an auxiliary gauge eta through
phi(C_lam * psi(u)) <= eta(lam * u); the canonical power triple and a
composition construction (eta = phi o psi) are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NumericError
from .quadrature import DEFAULT_CELLS, GridFunction

DECADE_GRID = np.logspace(-6.0, 6.0, 97)


@dataclass(frozen=True)
class PhiFunction:
    """A gauge function with its convexity declaration and family parameters."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    is_convex: bool = True
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        arr = np.asarray(u, dtype=float)
        out = np.asarray(self.fn(arr), dtype=float)
        if arr.ndim == 0:
            return float(out)
        return out


def power(p: float) -> PhiFunction:
    """phi(u) = u^p; generates L^p for p >= 1."""
    if p <= 0:
        raise ConfigError(f"power exponent must be positive, got {p}")
    return PhiFunction(name=f"power({p:g})", fn=lambda u: u**p, is_convex=p >= 1.0, params={"p": p})


def zygmund(alpha: float, beta: float) -> PhiFunction:
    """phi(u) = u^alpha * ln^beta(e + u), the Zygmund-space gauge."""
    if alpha < 1 or beta <= 0:
        raise ConfigError(f"zygmund requires alpha >= 1, beta > 0, got ({alpha}, {beta})")
    return PhiFunction(
        name=f"zygmund({alpha:g},{beta:g})",
        fn=lambda u: u**alpha * np.log(np.e + u) ** beta,
        is_convex=True,
        params={"alpha": alpha, "beta": beta},
    )


def exp_minus_one() -> PhiFunction:
    """phi(u) = e^u - 1, the exponential-space gauge (fails the doubling check)."""
    return PhiFunction(name="exp_minus_one", fn=np.expm1, is_convex=True, params={})


def make_phi(family: str, *args: float) -> PhiFunction:
    if family == "power":
        if len(args) != 1:
            raise ConfigError("power takes one parameter")
        return power(args[0])
    if family == "zygmund":
        if len(args) != 2:
            raise ConfigError("zygmund takes two parameters")
        return zygmund(args[0], args[1])
    if family == "exp_minus_one":
        if args:
            raise ConfigError("exp_minus_one takes no parameters")
        return exp_minus_one()
    raise ConfigError(f"unknown phi family '{family}'")


def validate_phi(phi: PhiFunction, samples: np.ndarray | None = None) -> None:
    """Spot-verify the gauge axioms on a grid; raises NumericError on failure.

    Unboundedness is checked on the decade ladder 10^1..10^6, a documented
    proxy for the true limit.
    """
    u = DECADE_GRID if samples is None else np.asarray(samples, dtype=float)
    u = np.sort(u[u > 0])
    if float(phi(0.0)) != 0.0:
        raise NumericError(f"{phi.name}: phi(0) != 0")
    with np.errstate(over="ignore", invalid="ignore"):
        vals = phi(u)
        if np.any(vals <= 0):
            raise NumericError(f"{phi.name}: positivity violated for u > 0")
        if np.any(np.diff(vals) < 0):
            raise NumericError(f"{phi.name}: not nondecreasing")
        ladder = phi(10.0 ** np.arange(1, 7))
        if np.any(np.diff(ladder) <= 0):
            raise NumericError(f"{phi.name}: decade ladder not strictly increasing")
        if phi.is_convex:
            a, b = np.meshgrid(u[::4], u[::4])
            lhs = phi((a + b) / 2.0)
            rhs = (phi(a) + phi(b)) / 2.0
            bad = lhs > rhs * (1.0 + 1e-12) + 1e-300
            if np.any(bad & np.isfinite(lhs)):
                raise NumericError(f"{phi.name}: midpoint convexity violated")


def modular(phi: PhiFunction, f: GridFunction, lam: float) -> float:
    """Quadrature value of integral phi(lam * |f(x)|) dx over f's grid."""
    if lam <= 0:
        raise NumericError(f"scale must be positive, got {lam}")
    if not np.all(np.isfinite(f.values)):
        raise NumericError("non-finite input")
    return f.integral_of(lambda v: phi(lam * np.abs(v)))


def shift_grid(delta: float, count: int) -> np.ndarray:
    """Symmetric odd-count shift grid on [-delta, delta] including endpoints and 0."""
    if delta <= 0:
        raise NumericError(f"shift radius must be positive, got {delta}")
    if count < 1 or count % 2 == 0:
        raise NumericError(f"shift count must be odd and >= 1, got {count}")
    if count == 1:
        return np.zeros(1)
    return np.linspace(-delta, delta, count)


def orlicz_modulus(
    phi: PhiFunction,
    f,
    delta: float,
    lam: float,
    domain: Sequence[float] | None = None,
    shift_count: int = 33,
    cells: int = DEFAULT_CELLS,
) -> float:
    """sup over shifts |t| <= delta of the modular of f(. + t) - f(.).

    The shift is realized by re-evaluating the analytic signal, never by
    index shifting; the sup is discretized to a symmetric odd-count grid
    including 0 and +-delta, so the result is nondecreasing in delta for
    signals whose shift-modular grows with |t|.
    """
    shifts = shift_grid(delta, shift_count)
    if domain is None:
        lo, hi = f.support
        domain = (lo - delta - 1.0, hi + delta + 1.0)
    kinks = tuple(getattr(f, "kinks", ()))
    best = 0.0
    for t in shifts:
        if t == 0.0:
            continue
        breakpoints = kinks + tuple(k - t for k in kinks)
        diff = GridFunction.sample(lambda x: f(x + t) - f(x), domain, cells, breakpoints)
        best = max(best, modular(phi, diff, lam))
    return best


@dataclass(frozen=True)
class Delta2Result:
    satisfied: bool
    ratio_max: float


def check_delta2(
    phi: PhiFunction, u_grid: np.ndarray | None = None, cap: float = 1e6
) -> Delta2Result:
    """Doubling check: is phi(2u)/phi(u) bounded (by ``cap``) on the grid?

    The grid must span at least 8 decades.  Overflow of phi(2u) counts as
    unbounded.
    """
    u = DECADE_GRID if u_grid is None else np.asarray(u_grid, dtype=float)
    if np.any(u <= 0):
        raise NumericError("doubling grid must be positive")
    if math.log10(u.max() / u.min()) < 8 - 1e-9:
        raise NumericError("doubling grid must span at least 8 decades")
    with np.errstate(over="ignore", invalid="ignore"):
        lo = phi(u)
        hi = phi(2.0 * u)
        if np.any(lo == 0):
            raise NumericError(f"{phi.name}: positivity violated for u > 0")
        ratio = hi / lo
    if np.any(~np.isfinite(ratio)):
        return Delta2Result(satisfied=False, ratio_max=math.inf)
    m = float(ratio.max())
    return Delta2Result(satisfied=m <= cap, ratio_max=m)


@dataclass(frozen=True)
class HTriple:
    """A (phi, psi, eta) triple with its lambda -> C_lambda map."""

    phi: PhiFunction
    psi: PhiFunction
    eta: PhiFunction
    c_lambda: Callable[[float], float]
    name: str = ""


def power_triple(p: float, q: float) -> HTriple:
    """Canonical L^p triple: phi=u^p, psi=u^(q/p), eta=u^q, C_lam=lam^(q/p)."""
    if not 1 <= q <= p:
        raise ConfigError(f"power triple requires 1 <= q <= p, got p={p}, q={q}")
    return HTriple(
        phi=power(p),
        psi=power(q / p),
        eta=power(q),
        c_lambda=lambda lam: lam ** (q / p),
        name=f"power_triple({p:g},{q:g})",
    )


def compose_triple(phi: PhiFunction, psi: PhiFunction) -> HTriple:
    """Triple with eta = phi o psi and C_lam = lam.

    Valid whenever psi(u)/u is nonincreasing (then psi(lam*u) >= lam*psi(u)
    for lam in (0,1), so phi(lam*psi(u)) <= phi(psi(lam*u))).  The claim is
    still verified numerically by `check_H`, never assumed.
    """
    eta = PhiFunction(
        name=f"compose({phi.name},{psi.name})",
        fn=lambda u: phi.fn(np.asarray(psi.fn(u), dtype=float)),
        is_convex=phi.is_convex,
        params={},
    )
    return HTriple(phi=phi, psi=psi, eta=eta, c_lambda=lambda lam: lam, name=eta.name)


def check_H(
    triple: HTriple,
    lambdas: Sequence[float],
    u_grid: np.ndarray | None = None,
    rel_tol: float = 1e-12,
) -> bool:
    """Verify phi(C_lam * psi(u)) <= eta(lam * u) on the (lambda, u) sample grid."""
    if u_grid is None:
        u = np.concatenate([[0.0], DECADE_GRID])
    else:
        u = np.asarray(u_grid, dtype=float)
    if not np.any(u == 0):
        raise NumericError("u grid must include 0")
    pos = u[u > 0]
    if pos.size == 0 or math.log10(pos.max() / pos.min()) < 8 - 1e-9:
        raise NumericError("u grid must span at least 8 decades")
    for lam in lambdas:
        if not 0 < lam < 1:
            raise NumericError(f"lambda must lie in (0,1), got {lam}")
        c = float(triple.c_lambda(lam))
        if not 0 < c < 1:
            raise NumericError(f"C_lambda outside (0,1): {c}")
        lhs = triple.phi(c * triple.psi(u))
        rhs = triple.eta(lam * u)
        if np.any(lhs > rhs + rel_tol * (1.0 + rhs)):
            return False
    return True


@dataclass(frozen=True)
class ModularTrend:
    converging: bool
    ws: tuple
    values: tuple


def detect_modular_convergence(
    phi: PhiFunction,
    errors: Sequence[tuple[float, GridFunction]],
    lam: float,
) -> ModularTrend:
    """Evaluate the modular of each reconstruction error and judge the trend.

    Converging means: each step decreases to within 10% slack and the last
    value fell below a quarter of the first (identically-zero sequences
    count as converged).
    """
    if len(errors) < 3:
        raise NumericError("insufficient sequence")
    ws = [w for w, _ in errors]
    if np.any(np.diff(ws) <= 0):
        raise NumericError("w sequence must be increasing")
    values = [modular(phi, gf, lam) for _, gf in errors]
    decreasing = all(b <= a * 1.1 for a, b in zip(values, values[1:]))
    collapsed = (values[0] == 0 and values[-1] == 0) or values[-1] < values[0] / 4.0
    return ModularTrend(converging=decreasing and collapsed, ws=tuple(ws), values=tuple(values))
