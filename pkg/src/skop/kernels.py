"""Kernel profiles, their discrete and continuous moments, and certification checks.

Two families are built in: the Fejér kernel (unbounded support, quadratic
decay) and the cardinal B-splines (compact support, a partition of unity).
Custom profiles can be loaded from two-column tables.  Signed profiles are
rejected: the moment and sup machinery below assumes nonnegativity.

For kernels with unbounded support every series / integral is truncated at
an explicit radius and the analytic tail of the declared decay envelope is
either added as an estimate or checked against a 1% budget, so truncation
is always accounted for rather than silently dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, NumericError, SchemeWindowError, TruncationError
from .quadrature import integrate, pairwise_sum
from .scheme import SamplingScheme

FEJER_DECAY = 2.0
FEJER_ENVELOPE = 2.0 / math.pi**2  # F(x) <= env * |x|^-2
FEJER_TAIL_MEAN = 1.0 / math.pi**2  # asymptotic mean of F(x) * x^2

DEFAULT_SERIES_RADIUS = 10**4


def sinc(x):
    """sin(pi x) / (pi x), with value 1 at x = 0."""
    return np.sinc(np.asarray(x, dtype=float))


def fejer(x):
    """Fejér kernel (1/2) sinc^2(x/2); nonnegative, unit mass."""
    return 0.5 * sinc(np.asarray(x, dtype=float) / 2.0) ** 2


def bspline(n: int, x):
    """Cardinal B-spline of order n: the n-fold convolution of the unit box.

    Evaluated from the alternating-sum formula
    (1/(n-1)!) * sum_j (-1)^j C(n,j) (n/2 + x - j)_+^(n-1),
    clamped to exactly zero outside [-n/2, n/2].
    """
    if n < 1:
        raise ConfigError(f"B-spline order must be >= 1, got {n}")
    xs = np.asarray(x, dtype=float)
    if n == 1:
        return ((xs >= -0.5) & (xs < 0.5)).astype(float)
    acc = np.zeros_like(xs)
    for j in range(n + 1):
        base = np.maximum(0.0, n / 2.0 + xs - j)
        acc += ((-1) ** j * math.comb(n, j)) * base ** (n - 1)
    acc /= math.factorial(n - 1)
    return np.where(np.abs(xs) < n / 2.0, acc, 0.0)


@dataclass(frozen=True)
class KernelProfile:
    """The function L with its support/decay metadata.

    Exactly one of the two support descriptions applies:
      * compact: ``support_bound`` B with L = 0 outside [-B, B];
      * decaying: ``decay`` = (d, envelope, tail_mean) meaning
        L(x) <= envelope * |x|^-d and L(x) * |x|^d -> tail_mean on average.
    ``breakpoints`` lists known kink locations for exact piecewise quadrature.
    """

    name: str
    fn: object
    support_bound: float | None = None
    decay: tuple[float, float, float] | None = None
    order: int | None = None
    breakpoints: tuple[float, ...] = ()

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.asarray(self.fn(arr), dtype=float)
        if arr.ndim == 0:
            return float(out)
        return out

    @property
    def compact(self) -> bool:
        return self.support_bound is not None


def _validate_profile(profile: KernelProfile) -> KernelProfile:
    if profile.support_bound is None and profile.decay is None:
        raise ConfigError(f"kernel '{profile.name}' declares neither support nor decay")
    hi = profile.support_bound if profile.compact else 50.0
    grid = np.linspace(-hi - 2.0, hi + 2.0, 4001)
    vals = profile(grid)
    if np.any(vals < 0):
        raise ConfigError(f"signed kernel profiles are rejected: '{profile.name}'")
    if profile.compact:
        outside = np.abs(grid) > profile.support_bound
        if np.any(vals[outside] != 0.0):
            raise ConfigError(f"kernel '{profile.name}' is nonzero outside its support")
    return profile


def fejer_kernel() -> KernelProfile:
    return _validate_profile(
        KernelProfile(
            name="fejer",
            fn=fejer,
            decay=(FEJER_DECAY, FEJER_ENVELOPE, FEJER_TAIL_MEAN),
        )
    )


def bspline_kernel(n: int) -> KernelProfile:
    knots = tuple(-n / 2.0 + j for j in range(n + 1))
    return _validate_profile(
        KernelProfile(
            name=f"bspline({n})",
            fn=lambda x: bspline(n, x),
            support_bound=n / 2.0,
            order=n,
            breakpoints=knots,
        )
    )


def table_kernel(path: str) -> KernelProfile:
    """Two-column text file x, L(x); linear interpolation, zero outside."""
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise ConfigError(f"table kernel '{path}' must have two columns and >= 2 rows")
    order = np.argsort(data[:, 0])
    xs, ys = data[order, 0], data[order, 1]
    if np.any(ys < 0):
        raise ConfigError(f"signed kernel profiles are rejected: table '{path}'")
    bound = float(max(abs(xs[0]), abs(xs[-1])))
    bps = tuple(xs) if xs.size <= 64 else ()
    return _validate_profile(
        KernelProfile(
            name=f"table({path})",
            fn=lambda x: np.interp(x, xs, ys, left=0.0, right=0.0),
            support_bound=bound,
            breakpoints=bps,
        )
    )


def make_kernel(family: str, *args) -> KernelProfile:
    if family == "fejer":
        if args:
            raise ConfigError("fejer takes no parameters")
        return fejer_kernel()
    if family == "bspline":
        if len(args) != 1 or float(args[0]) != int(args[0]):
            raise ConfigError("bspline takes one integer order")
        return bspline_kernel(int(args[0]))
    if family == "table":
        if len(args) != 1:
            raise ConfigError("table takes one path")
        return table_kernel(str(args[0]))
    raise ConfigError(f"unknown kernel '{family}'")


def l1_norm(profile: KernelProfile, radius: float = DEFAULT_SERIES_RADIUS) -> float:
    """||L||_1 by quadrature (plus decay-envelope tail estimate when unbounded)."""
    if profile.compact:
        b = profile.support_bound
        return integrate(profile, -b, b, cells=4096, breakpoints=profile.breakpoints)
    d, _, tail_mean = profile.decay
    core = integrate(profile, -1.0, 1.0, cells=512)
    wings = integrate(profile, 1.0, radius, cells=max(4096, int(4 * radius)))
    wings += integrate(profile, -radius, -1.0, cells=max(4096, int(4 * radius)))
    tail = 2.0 * tail_mean * radius ** (1.0 - d) / (d - 1.0)
    return core + wings + tail


def _discrete_tail_estimate(
    profile: KernelProfile, beta: float, radius: float, gap_lo: float, gap_hi: float
) -> float:
    """Upper estimate of the neglected series mass beyond the index radius."""
    if profile.compact:
        return 0.0 if radius >= profile.support_bound else math.inf
    d, envelope, _ = profile.decay
    if beta >= d - 1.0:
        return math.inf
    start = max(radius - gap_hi, 1.0)
    return (2.0 * envelope / gap_lo) * start ** (beta - d + 1.0) / (d - 1.0 - beta)


def _default_probes(scheme: SamplingScheme) -> np.ndarray:
    if scheme.kind == "uniform":
        return np.linspace(0.0, 1.0, 257)
    m = min(4, scheme.window - 1)
    return np.linspace(scheme.node(-m), scheme.node(m), 1025)


def discrete_moment(
    profile: KernelProfile,
    scheme: SamplingScheme,
    beta: float,
    probe_grid: np.ndarray | None = None,
    radius: float | None = None,
) -> float:
    """sup over probes u of sum_k L(u - t_k) |u - t_k|^beta, series truncated.

    Returns inf when the declared decay makes the series divergent.  Raises
    TruncationError when the tail estimate exceeds 1% of the partial sum.
    For uniform schemes the sup over the real line reduces to one period;
    for non-uniform schemes the probed window yields a lower bound of the
    true sup.
    """
    if beta < 0:
        raise ConfigError(f"moment order must be nonnegative, got {beta}")
    probes = _default_probes(scheme) if probe_grid is None else np.asarray(probe_grid, float)
    if radius is None:
        radius = profile.support_bound + scheme.delta_hi if profile.compact else DEFAULT_SERIES_RADIUS
    tail = _discrete_tail_estimate(profile, beta, radius, scheme.delta_lo, scheme.delta_hi)
    if math.isinf(tail):
        if not profile.compact and beta >= profile.decay[0] - 1.0:
            return math.inf
        raise TruncationError("insufficient truncation radius")
    nodes = scheme.nodes
    if nodes[0] > probes.min() - radius or nodes[-1] < probes.max() + radius:
        raise SchemeWindowError(
            "scheme window too small: need nodes covering "
            f"[{probes.min() - radius:g}, {probes.max() + radius:g}]"
        )
    best = 0.0
    for u in probes:
        lo = np.searchsorted(nodes, u - radius, side="left")
        hi = np.searchsorted(nodes, u + radius, side="right")
        s = u - nodes[lo:hi]
        total = pairwise_sum(profile(s) * np.abs(s) ** beta)
        best = max(best, total)
    if tail > 0.01 * best:
        raise TruncationError("insufficient truncation radius")
    return best


def continuous_moment(
    profile: KernelProfile, nu: float, radius: float = DEFAULT_SERIES_RADIUS
) -> float:
    """integral of L(u) |u|^nu du; math.inf when the decay cannot pay for nu."""
    if nu < 0:
        raise ConfigError(f"moment order must be nonnegative, got {nu}")

    def integrand(u):
        return profile(u) * np.abs(u) ** nu

    if profile.compact:
        b = profile.support_bound
        bps = tuple(profile.breakpoints) + (0.0,)
        return integrate(integrand, -b, b, cells=4096, breakpoints=bps)
    d, _, tail_mean = profile.decay
    if nu >= d - 1.0:
        return math.inf
    core = integrate(integrand, -1.0, 1.0, cells=512)
    cells = max(4096, int(4 * radius))
    wings = integrate(integrand, 1.0, radius, cells=cells)
    wings += integrate(integrand, -radius, -1.0, cells=cells)
    tail = 2.0 * tail_mean * radius ** (nu + 1.0 - d) / (d - 1.0 - nu)
    return core + wings + tail


@dataclass(frozen=True)
class MomentTable:
    """Summary of a kernel's mass and moments; inf values carry finite=False."""

    l1_norm: float
    m0: float
    m_beta: dict = field(default_factory=dict)
    m_nu: dict = field(default_factory=dict)

    def entry_finite(self, table: str, key: float) -> bool:
        value = getattr(self, table)[key]
        return math.isfinite(value)


def moment_table(
    profile: KernelProfile,
    scheme: SamplingScheme,
    betas: Sequence[float] = (1.0,),
    nus: Sequence[float] = (1.0, 2.0),
) -> MomentTable:
    m_beta = {float(b): discrete_moment(profile, scheme, b) for b in betas}
    m_nu = {float(v): continuous_moment(profile, v) for v in nus}
    return MomentTable(
        l1_norm=l1_norm(profile),
        m0=discrete_moment(profile, scheme, 0.0),
        m_beta=m_beta,
        m_nu=m_nu,
    )


@dataclass(frozen=True)
class UnityReport:
    max_deviation: float
    radius: int
    tail_bound: float


def check_partition_of_unity(
    profile: KernelProfile,
    probe_grid: np.ndarray | None = None,
    radius: int | None = None,
) -> UnityReport:
    """max over probes of |sum_{|k| <= radius} L(u - k) - 1| on the integer lattice."""
    probes = np.linspace(0.0, 1.0, 257) if probe_grid is None else np.asarray(probe_grid, float)
    if radius is None:
        radius = int(math.ceil(profile.support_bound)) + 1 if profile.compact else DEFAULT_SERIES_RADIUS
    ks = np.arange(-radius, radius + 1, dtype=float)
    worst = 0.0
    for chunk in np.array_split(probes, max(1, probes.size // 64)):
        sums = np.add.reduce(profile(chunk[:, None] - ks[None, :]), axis=1)
        worst = max(worst, float(np.abs(sums - 1.0).max()))
    tail = _discrete_tail_estimate(profile, 0.0, float(radius), 1.0, 1.0)
    return UnityReport(max_deviation=worst, radius=radius, tail_bound=tail)


@dataclass(frozen=True)
class TailFit:
    """Fit of the out-of-window mass T(w) = integral_{|u| > w^(1-alpha)} L(u) du.

    The fitted model is T(w) <= m1_fit * w^(-alpha0_fit) with m1_fit inflated
    to dominate every sample.  exact_zero marks the compact-support case in
    which every value vanished and no fit is possible.
    """

    alpha: float
    ws: tuple
    values: tuple
    exact_zero: bool
    alpha0_fit: float | None = None
    m1_fit: float | None = None


def _tail_mass(profile: KernelProfile, cut: float) -> float:
    if profile.compact:
        b = profile.support_bound
        if cut >= b:
            return 0.0
        bps = tuple(profile.breakpoints)
        return integrate(profile, cut, b, cells=1024, breakpoints=bps) + integrate(
            profile, -b, -cut, cells=1024, breakpoints=bps
        )
    d, _, tail_mean = profile.decay
    far = max(10.0**5, 100.0 * cut)
    cells = max(2048, int(4 * (far - cut)))
    mass = integrate(profile, cut, far, cells=cells)
    mass += integrate(profile, -far, -cut, cells=cells)
    mass += 2.0 * tail_mean * far ** (1.0 - d) / (d - 1.0)
    return mass


def check_tail_condition(
    profile: KernelProfile, alpha: float, w_list: Sequence[float]
) -> TailFit:
    """Evaluate T(w) over the w ladder and fit its decay exponent.

    Requires at least 4 positive values for the log-log fit; a ladder of
    exact zeros (compact support beyond the cut) is flagged instead.
    """
    if not 0 < alpha < 1:
        raise ConfigError(f"splitting exponent must lie in (0,1), got {alpha}")
    ws = tuple(float(w) for w in w_list)
    values = tuple(_tail_mass(profile, w ** (1.0 - alpha)) for w in ws)
    positives = [(w, v) for w, v in zip(ws, values) if v > 0]
    if not positives:
        return TailFit(alpha=alpha, ws=ws, values=values, exact_zero=True)
    if len(positives) < 4:
        raise NumericError("need at least 4 positive tail values to fit")
    lw = np.log([w for w, _ in positives])
    lv = np.log([v for _, v in positives])
    slope, intercept = np.polyfit(lw, lv, 1)
    m1 = math.exp(intercept)
    inflate = max(v / (m1 * w**slope) for w, v in positives)
    return TailFit(
        alpha=alpha,
        ws=ws,
        values=values,
        exact_zero=False,
        alpha0_fit=float(-slope),
        m1_fit=float(m1 * inflate),
    )
