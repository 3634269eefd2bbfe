"""Physical configuration of the resonator network and shared value types.

Everything is expressed in dimensionless rotating-frame units: frequencies
and rates are offsets from the (never represented) carrier, the detuning
scale delta is the canonical unit, and time is measured in inverse
frequency units.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np


class SymmetryError(ValueError):
    """Raised when a closed-form operation gets an asymmetric network."""


def _as_tuple(x) -> tuple[float, ...]:
    return tuple(float(v) for v in np.atleast_1d(x))


@dataclass(frozen=True)
class MemoryConfig:
    """Parameter set of the N+1 resonator network.

    A common resonator (waveguide coupling ``kappa0`` when the switch is
    closed, decay ``gamma0``) is coupled with strengths ``f * w_n`` to N
    mini-resonators sitting at frequency offsets ``offsets`` with decay
    constants ``gamma``.  The canonical topology is N = 3 with offsets
    (-delta, 0, +delta); the closed-form operations require it, the
    dynamics and matrix eigenproblems accept any N >= 1.
    """

    delta: float = 1.0
    offsets: tuple[float, ...] | None = None
    coupling_weights: tuple[float, ...] = (1.0, 1.0, 1.0)
    f: float = 0.0
    gamma: tuple[float, ...] = (0.0, 0.0, 0.0)
    gamma0: float = 0.0
    kappa0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "delta", float(self.delta))
        if self.offsets is None:
            object.__setattr__(self, "offsets", (-self.delta, 0.0, self.delta))
        else:
            object.__setattr__(self, "offsets", _as_tuple(self.offsets))
        object.__setattr__(self, "coupling_weights", _as_tuple(self.coupling_weights))
        object.__setattr__(self, "f", float(self.f))
        object.__setattr__(self, "gamma", _as_tuple(self.gamma))
        object.__setattr__(self, "gamma0", float(self.gamma0))
        object.__setattr__(self, "kappa0", float(self.kappa0))

    @property
    def n_modes(self) -> int:
        """Number of mini-resonators."""
        return len(self.offsets)

    @property
    def f_n(self) -> np.ndarray:
        """Per-resonator coupling strengths f * w_n."""
        return self.f * np.asarray(self.coupling_weights)

    @property
    def offsets_array(self) -> np.ndarray:
        return np.asarray(self.offsets)

    @property
    def gamma_array(self) -> np.ndarray:
        return np.asarray(self.gamma)

    @property
    def lossless(self) -> bool:
        return self.gamma0 == 0.0 and all(g == 0.0 for g in self.gamma)

    def is_symmetric(self, rtol: float = 1e-12) -> bool:
        """True for the mirror-symmetric 3-resonator topology.

        Requires offsets (-delta, 0, +delta), w1 == w3 and gamma1 == gamma3;
        all closed forms (storage quartic, lossless S11, phase delay, the
        coupling matching condition) are derived under exactly this symmetry.
        """
        if self.n_modes != 3:
            return False
        tol = rtol * max(1.0, abs(self.delta))
        o = self.offsets
        return (
            abs(o[0] + self.delta) <= tol
            and abs(o[1]) <= tol
            and abs(o[2] - self.delta) <= tol
            and abs(self.coupling_weights[0] - self.coupling_weights[2]) <= tol
            and abs(self.gamma[0] - self.gamma[2]) <= tol
        )

    def require_symmetric(self, operation: str) -> None:
        if not self.is_symmetric():
            raise SymmetryError(
                f"{operation} requires the symmetric 3-resonator topology "
                "(offsets (-delta, 0, delta), w1 == w3, gamma1 == gamma3)"
            )

    def with_gamma(self, gamma_all: float) -> "MemoryConfig":
        """Copy with equal decay gamma_n = gamma0 = gamma_all."""
        return replace(self, gamma=(gamma_all,) * self.n_modes, gamma0=gamma_all)

    def without_loss(self) -> "MemoryConfig":
        return replace(self, gamma=(0.0,) * self.n_modes, gamma0=0.0)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "offsets": list(self.offsets),
            "coupling_weights": list(self.coupling_weights),
            "f": self.f,
            "gamma": list(self.gamma),
            "gamma0": self.gamma0,
            "kappa0": self.kappa0,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MemoryConfig":
        known = {"delta", "offsets", "coupling_weights", "f", "gamma", "gamma0", "kappa0"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**{k: d[k] for k in known & set(d)})


def validate(config: MemoryConfig) -> list[str]:
    """Diagnostic invariant check; returns one message per violation."""
    problems: list[str] = []
    if not config.delta > 0:
        problems.append(f"delta must be > 0, got {config.delta}")
    n = config.n_modes
    if n < 1:
        problems.append("offsets must contain at least one resonator")
    if len(config.coupling_weights) != n:
        problems.append(
            f"coupling_weights length {len(config.coupling_weights)} != offsets length {n}"
        )
    if len(config.gamma) != n:
        problems.append(f"gamma length {len(config.gamma)} != offsets length {n}")
    if config.f < 0:
        problems.append(f"f must be >= 0, got {config.f}")
    for i, w in enumerate(config.coupling_weights):
        if w < 0:
            problems.append(f"coupling_weights[{i}] must be >= 0, got {w}")
    for i, g in enumerate(config.gamma):
        if g < 0:
            problems.append(f"gamma[{i}] must be >= 0, got {g}")
    if config.gamma0 < 0:
        problems.append(f"gamma0 must be >= 0, got {config.gamma0}")
    if config.kappa0 < 0:
        problems.append(f"kappa0 must be >= 0, got {config.kappa0}")
    return problems


def make_case(label: str) -> MemoryConfig:
    """Reference configurations of the two matched designs.

    Case A: equal weights [1, 1, 1], f = 1.119, quartic spectrum ratio 4.
    Case B: weights [0.8, 1, 0.8], f = 1.038, equidistant spectrum ratio 3.
    Both lossless with delta = 1; kappa0 is filled from the flat-delay
    matching condition.
    """
    from .optimize import solve_kappa

    label = str(label).upper()
    if label == "A":
        cfg = MemoryConfig(delta=1.0, coupling_weights=(1.0, 1.0, 1.0), f=1.119)
    elif label == "B":
        cfg = MemoryConfig(delta=1.0, coupling_weights=(0.8, 1.0, 0.8), f=1.038)
    else:
        raise ValueError(f"unknown case label {label!r}; expected 'A' or 'B'")
    return replace(cfg, kappa0=solve_kappa(cfg))


@dataclass(frozen=True)
class GaussianPulse:
    """Input pulse a_in(t) = amplitude * exp(-(t - center)^2 / (2 sigma^2)).

    With amplitude None the peak is set to (pi sigma^2)^(-1/4) so the pulse
    carries unit energy.
    """

    sigma: float = 1.0
    center: float = 0.0
    amplitude: complex | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")

    @property
    def peak(self) -> complex:
        if self.amplitude is None:
            return (np.pi * self.sigma**2) ** -0.25
        return self.amplitude

    def waveform(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.peak * np.exp(-((t - self.center) ** 2) / (2 * self.sigma**2)) + 0j

    def energy(self) -> float:
        return float(abs(self.peak) ** 2 * self.sigma * np.sqrt(np.pi))


@dataclass(frozen=True)
class SwitchSchedule:
    """Piecewise-constant waveguide coupling k(t).

    ``segments`` is an ordered sequence of (t_start, k_value); the first
    segment begins at the simulation start time and each segment lasts
    until the next one (the last to the end of the run).  Memory operation
    toggles between 0 and kappa0, but any k >= 0 is accepted.
    """

    segments: tuple[tuple[float, float], ...]

    def __post_init__(self):
        segs = tuple((float(t), float(k)) for t, k in self.segments)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        for (t0, k0), (t1, _) in zip(segs, segs[1:]):
            if not t1 > t0:
                raise ValueError(f"segment start times must be strictly increasing, got {t0} then {t1}")
        for t, k in segs:
            if k < 0:
                raise ValueError(f"coupling must be >= 0, got {k} at t={t}")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def always_on(cls, k: float, t_start: float = 0.0) -> "SwitchSchedule":
        return cls(((t_start, k),))

    @property
    def t_start(self) -> float:
        return self.segments[0][0]

    def k_at(self, t: float) -> float:
        k = self.segments[0][1]
        for ts, kv in self.segments:
            if t >= ts:
                k = kv
        return k

    def last_switch_on(self) -> float | None:
        """Time of the last transition from k = 0 to k > 0, if any."""
        t_on = None
        for (t0, k0), (t1, k1) in zip(self.segments, self.segments[1:]):
            if k0 == 0.0 and k1 > 0.0:
                t_on = t1
        return t_on


def load_config_file(path) -> tuple[MemoryConfig, GaussianPulse | None, SwitchSchedule | None]:
    """Read a JSON configuration document.

    Top-level keys are the MemoryConfig fields plus optional
    ``pulse: {sigma, center}`` and ``schedule: {segments: [[t, k], ...]}``.
    """
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a JSON object at top level")
    pulse = None
    schedule = None
    if "pulse" in doc:
        p = doc.pop("pulse")
        pulse = GaussianPulse(sigma=p["sigma"], center=p.get("center", 0.0))
    if "schedule" in doc:
        s = doc.pop("schedule")
        schedule = SwitchSchedule(tuple((t, k) for t, k in s["segments"]))
    config = MemoryConfig.from_dict(doc)
    problems = validate(config)
    if problems:
        raise ValueError(f"{path}: invalid configuration: " + "; ".join(problems))
    return config, pulse, schedule
