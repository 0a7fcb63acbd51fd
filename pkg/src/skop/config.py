"""Experiment configuration: INI-style sections, strict keys, canonical hash.

A config file has one section per component, `key = value` entries only:

    [kernel]
    type = bspline(2)

    [signal]
    type = hat(0, 1)

    [experiment]
    p = 1
    w_ladder = 5, 10, 20, 40, 80

Unknown sections or keys are hard errors: a misspelled tolerance must not
be silently defaulted.  The canonical serialization (sorted section.key
lines) is hashed into every report for provenance.
"""

from __future__ import annotations

import configparser
import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .kernels import KernelProfile, make_kernel
from .nonlinearity import Nonlinearity, make_nonlinearity
from .phi import HTriple, PhiFunction, compose_triple, make_phi, power_triple
from .scheme import SamplingScheme, make_scheme
from .signals import Signal, make_signal

_SPEC_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?$")

ALLOWED_KEYS = {
    "kernel": {"type", "truncation_radius", "tail_budget"},
    "nonlin": {"type"},
    "scheme": {"type", "window"},
    "signal": {"type"},
    "experiment": {
        "p",
        "w_ladder",
        "domain",
        "grid_size",
        "alpha",
        "lambda0",
        "phi",
        "triple",
        "betas",
        "nus",
        "seed",
        "w_reconstruct",
        "shift_count",
        "norm_cells",
    },
}


def parse_spec_string(text: str) -> tuple[str, tuple]:
    """Split 'name(a, b)' into the name and its parsed arguments."""
    m = _SPEC_RE.match(text.strip())
    if not m:
        raise ConfigError(f"malformed spec '{text}'")
    name = m.group(1)
    raw = m.group(2)
    if raw is None or raw.strip() == "":
        return name, ()
    args = []
    for piece in raw.split(","):
        piece = piece.strip()
        try:
            args.append(float(piece))
        except ValueError:
            args.append(piece)
    return name, tuple(args)


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got '{text}'") from None


@dataclass
class ExperimentConfig:
    """Parsed configuration; component objects are built on demand."""

    kernel_spec: str = "bspline(2)"
    truncation_radius: float | None = None
    tail_budget: float = 1e-4
    nonlin_spec: str = "identity"
    scheme_spec: str = "uniform"
    scheme_window: int | None = None
    signal_spec: str = "hat(0, 1)"
    p: float = 1.0
    w_ladder: tuple[float, ...] = (5.0, 10.0, 20.0, 40.0, 80.0)
    domain: tuple[float, float] = (-2.0, 2.0)
    grid_size: int = 1025
    alpha: float = 0.5
    lambda0: float = 1.0
    phi_spec: str = "power(2)"
    triple_spec: str = "auto"
    betas: tuple[float, ...] | None = None
    nus: tuple[float, ...] | None = None
    seed: int = 0
    w_reconstruct: float | None = None
    shift_count: int = 33
    norm_cells: int = 2048
    source: dict = field(default_factory=dict)

    def validate(self) -> None:
        if len(self.w_ladder) < 4:
            raise ConfigError("w_ladder must hold at least 4 entries")
        if any(b >= a for a, b in zip(self.w_ladder[1:], self.w_ladder[:-1])):
            raise ConfigError("w_ladder must be strictly increasing")
        if self.w_ladder[0] <= 0:
            raise ConfigError("w_ladder entries must be positive")
        if self.grid_size < 257:
            raise ConfigError("grid_size must be at least 257")
        if not self.domain[1] > self.domain[0]:
            raise ConfigError("domain must be a nonempty interval")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.lambda0 <= 0:
            raise ConfigError("lambda0 must be positive")
        if self.shift_count < 1 or self.shift_count % 2 == 0:
            raise ConfigError("shift_count must be odd and >= 1")

    # -- component factories -------------------------------------------------

    def build_kernel(self) -> KernelProfile:
        name, args = parse_spec_string(self.kernel_spec)
        return make_kernel(name, *args)

    def build_nonlinearity(self) -> Nonlinearity:
        name, args = parse_spec_string(self.nonlin_spec)
        return make_nonlinearity(name, *args)

    def build_signal(self) -> Signal:
        name, args = parse_spec_string(self.signal_spec)
        return make_signal(name, *args)

    def build_scheme(self, window: int) -> SamplingScheme:
        if self.scheme_window is not None:
            window = self.scheme_window
        name, args = parse_spec_string(self.scheme_spec)
        return make_scheme(name, window, *args)

    def build_phi(self) -> PhiFunction:
        name, args = parse_spec_string(self.phi_spec)
        return make_phi(name, *args)

    def build_triple(self, nonlin: Nonlinearity) -> HTriple:
        name, args = parse_spec_string(self.triple_spec)
        if name == "auto":
            return compose_triple(self.build_phi(), nonlin.psi)
        if name == "power":
            if len(args) != 2:
                raise ConfigError("triple power takes (p, q)")
            return power_triple(args[0], args[1])
        raise ConfigError(f"unknown triple '{name}'")

    # -- provenance -----------------------------------------------------------

    def canonical_text(self) -> str:
        lines = [f"{sec}.{key} = {val}" for (sec, key), val in sorted(self.source.items())]
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def _apply(cfg: ExperimentConfig, section: str, key: str, value: str) -> None:
    if section == "kernel":
        if key == "type":
            cfg.kernel_spec = value
        elif key == "truncation_radius":
            cfg.truncation_radius = float(value)
        elif key == "tail_budget":
            cfg.tail_budget = float(value)
    elif section == "nonlin":
        cfg.nonlin_spec = value
    elif section == "scheme":
        if key == "type":
            cfg.scheme_spec = value
        elif key == "window":
            cfg.scheme_window = int(value)
    elif section == "signal":
        cfg.signal_spec = value
    elif section == "experiment":
        if key == "p":
            cfg.p = float(value)
        elif key == "w_ladder":
            cfg.w_ladder = _parse_floats(value)
        elif key == "domain":
            pair = _parse_floats(value)
            if len(pair) != 2:
                raise ConfigError("domain takes two numbers")
            cfg.domain = (pair[0], pair[1])
        elif key == "grid_size":
            cfg.grid_size = int(value)
        elif key == "alpha":
            cfg.alpha = float(value)
        elif key == "lambda0":
            cfg.lambda0 = float(value)
        elif key == "phi":
            cfg.phi_spec = value
        elif key == "triple":
            cfg.triple_spec = value
        elif key == "betas":
            cfg.betas = _parse_floats(value)
        elif key == "nus":
            cfg.nus = _parse_floats(value)
        elif key == "seed":
            cfg.seed = int(value)
        elif key == "w_reconstruct":
            cfg.w_reconstruct = float(value)
        elif key == "shift_count":
            cfg.shift_count = int(value)
        elif key == "norm_cells":
            cfg.norm_cells = int(value)


def load_config(path: str | Path) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    cfg = ExperimentConfig()
    for section in parser.sections():
        if section not in ALLOWED_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in parser.items(section):
            if key not in ALLOWED_KEYS[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            try:
                _apply(cfg, section, key, value)
            except (ValueError, TypeError):
                raise ConfigError(f"bad value for {section}.{key}: '{value}'") from None
            cfg.source[(section, key)] = value
    cfg.validate()
    return cfg
