"""Built-in analytic test signals with declared support, kinks and smoothness.

Each signal knows where its derivative breaks (``kinks``) so the shared
quadrature engine can split cells there, and carries an optional declared
smoothness exponent used by the rate experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Signal:
    """An analytic signal f with metadata for quadrature and experiments.

    ``support`` is the interval outside of which f is zero (or negligible,
    see ``decay_note``); ``lip_alpha`` is the declared smoothness exponent
    of its integral modulus, None when unknown.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    kinks: tuple[float, ...] = ()
    lip_alpha: float | None = None
    decay_note: str = "compact"
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.asarray(self.fn(arr), dtype=float)
        if arr.ndim == 0:
            return float(out)
        return out


def hat(center: float = 0.0, half_width: float = 1.0) -> Signal:
    """Triangular bump max(0, 1 - |x-c|/h); piecewise linear."""
    if half_width <= 0:
        raise ConfigError("hat half_width must be positive")
    c, h = float(center), float(half_width)
    return Signal(
        name=f"hat({c:g},{h:g})",
        fn=lambda x: np.maximum(0.0, 1.0 - np.abs(x - c) / h),
        support=(c - h, c + h),
        kinks=(c - h, c, c + h),
        lip_alpha=1.0,
        params={"center": c, "half_width": h},
    )


def root_bump(center: float = 0.0, half_width: float = 1.0) -> Signal:
    """Square-root bump max(0, 1 - |x-c|/h)^(1/2); sqrt-steep at its edges."""
    if half_width <= 0:
        raise ConfigError("root_bump half_width must be positive")
    c, h = float(center), float(half_width)
    return Signal(
        name=f"root_bump({c:g},{h:g})",
        fn=lambda x: np.sqrt(np.maximum(0.0, 1.0 - np.abs(x - c) / h)),
        support=(c - h, c + h),
        kinks=(c - h, c, c + h),
        lip_alpha=0.5,
        params={"center": c, "half_width": h},
    )


def gauss(center: float = 0.0, sigma: float = 1.0) -> Signal:
    """Gaussian bump exp(-(x-c)^2 / (2 s^2)); smooth, support taken at 10 sigma."""
    if sigma <= 0:
        raise ConfigError("gauss sigma must be positive")
    c, s = float(center), float(sigma)
    return Signal(
        name=f"gauss({c:g},{s:g})",
        fn=lambda x: np.exp(-((x - c) ** 2) / (2.0 * s * s)),
        support=(c - 10.0 * s, c + 10.0 * s),
        kinks=(),
        lip_alpha=1.0,
        decay_note="gaussian tail below 2e-22 outside the declared support",
        params={"center": c, "sigma": s},
    )


def box(a: float = 0.0, b: float = 1.0) -> Signal:
    """Indicator of [a, b]; jump discontinuities at both ends."""
    if not b > a:
        raise ConfigError("box requires a < b")
    a, b = float(a), float(b)
    return Signal(
        name=f"box({a:g},{b:g})",
        fn=lambda x: ((x >= a) & (x <= b)).astype(float),
        support=(a, b),
        kinks=(a, b),
        lip_alpha=None,
        params={"a": a, "b": b},
    )


def constant(level: float, a: float, b: float) -> Signal:
    """Constant level on [a, b] (a box scaled by ``level``)."""
    sig = box(a, b)
    lv = float(level)
    return Signal(
        name=f"constant({lv:g},{a:g},{b:g})",
        fn=lambda x: lv * sig.fn(x),
        support=sig.support,
        kinks=sig.kinks,
        lip_alpha=None,
        params={"level": lv, "a": a, "b": b},
    )


BUILTINS = {"hat": hat, "root_bump": root_bump, "gauss": gauss, "box": box}


def make_signal(family: str, *args: float) -> Signal:
    ctor = BUILTINS.get(family)
    if ctor is None:
        raise ConfigError(f"unknown signal '{family}'")
    try:
        return ctor(*args)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for signal '{family}': {exc}") from None
