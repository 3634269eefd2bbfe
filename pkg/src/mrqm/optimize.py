"""Two-step parameter matching of the memory.

Step 1 picks the mini-resonator coupling f so the disconnected (k = 0)
spectrum is a commensurate multiplet [-r, -1, 1, r] * base.  Step 2 picks
the waveguide coupling kappa that flattens the phase delay at band center
(vanishing second derivative of tau at omega = 0), which realizes impedance
matching.  The plateau of tau(omega)/tau(0) is then the operating band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .eigen import eigenfreqs, char_poly_storage, multiplet_base
from .model import MemoryConfig
from .spectral import SpectralCurve, phase_delay


def solve_f(weights, delta: float, ratio: int) -> tuple[float, ...]:
    """All couplings f > 0 whose k = 0 spectrum has root ratio `ratio`.

    With u = f^2, A = sum w_n^2 and C = delta^2 w2^2 (r^2+1)^2 / r^2 the
    ratio condition (A u + delta^2)^2 = C u is a quadratic in u; both roots
    are positive whenever the discriminant is nonnegative.  Solutions are
    returned ascending and each is verified against the storage quartic.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (3,):
        raise ValueError("weights must be a sequence of 3 values")
    if abs(w[0] - w[2]) > 1e-12:
        raise ValueError(f"weights must be symmetric (w1 == w3), got {w.tolist()}")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if w[1] == 0:
        raise ValueError("central weight w2 must be positive for a multiplet target")
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    r = int(ratio)
    if r != ratio or r < 1:
        raise ValueError(f"ratio must be a positive integer, got {ratio}")
    if r == 1:
        raise ValueError("ratio 1 requests a degenerate double root; no multiplet exists")

    A = float(np.sum(w**2))
    B = delta**2
    C = delta**2 * w[1] ** 2 * (r * r + 1) ** 2 / (r * r)
    disc = (2 * A * B - C) ** 2 - 4 * A * A * B * B  # = C (C - 4 A B)
    if disc < 0:
        raise ValueError(
            f"no real coupling gives ratio {r} for weights {w.tolist()}: "
            "the minimum achievable ratio is larger"
        )
    us = [((C - 2 * A * B) - math.sqrt(disc)) / (2 * A * A),
          ((C - 2 * A * B) + math.sqrt(disc)) / (2 * A * A)]
    sols = []
    for u in us:
        if u <= 0:
            continue
        f = math.sqrt(u)
        cfg = MemoryConfig(delta=delta, coupling_weights=tuple(w), f=f)
        _, c2, c0 = char_poly_storage(cfg)
        d = math.sqrt(c2 * c2 - 4 * c0)
        got = math.sqrt((-c2 + d) / (-c2 - d))
        if abs(got - r) > 1e-6 * r:
            raise RuntimeError(f"solution f = {f} fails verification: ratio {got} != {r}")
        sols.append(f)
    return tuple(sorted(set(sols)))


def _d2_tau_at_zero(config: MemoryConfig, k: float, h: float) -> float:
    """Five-point central second difference of tau at omega = 0."""
    om = np.array([-2 * h, -h, 0.0, h, 2 * h])
    t = phase_delay(om, config, k)
    return float((-t[0] + 16 * t[1] - 30 * t[2] + 16 * t[3] - t[4]) / (12 * h * h))


def solve_kappa(config: MemoryConfig, fd_step: float | None = None) -> float:
    """Waveguide coupling flattening the phase delay at band center.

    Finds kappa > 0 with d^2 tau / d omega^2 = 0 at omega = 0 by a scalar
    root search on the five-point stencil (step 1e-3 * delta): bisection on
    [1e-3, 50] * delta, expanded upward if the root lies outside, then a
    secant polish to 1e-10 relative.
    """
    config.require_symmetric("solve_kappa")
    if not config.lossless:
        raise ValueError("solve_kappa requires all decay constants to be zero")
    if not config.f > 0:
        raise ValueError(f"solve_kappa requires f > 0, got {config.f}")
    if config.f_n[1] == 0:
        raise ValueError("solve_kappa is degenerate for f2 = 0 (no band-center response)")

    h = 1e-3 * config.delta if fd_step is None else fd_step
    lo = 1e-3 * config.delta
    hi = 50.0 * config.delta
    flo = _d2_tau_at_zero(config, lo, h)
    fhi = _d2_tau_at_zero(config, hi, h)
    while flo * fhi > 0 and hi < 1e4 * config.delta:
        hi *= 2
        fhi = _d2_tau_at_zero(config, hi, h)
    if flo * fhi > 0:
        raise ValueError("no curvature sign change found; cannot bracket kappa")
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        fm = _d2_tau_at_zero(config, mid, h)
        if flo * fm <= 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    a, b = lo, hi
    fa, fb = flo, fhi
    for _ in range(12):
        if fb == fa:
            break
        c = b - fb * (b - a) / (fb - fa)
        if not (1e-4 * config.delta < c < 1e5 * config.delta):
            break
        a, fa = b, fb
        b, fb = c, _d2_tau_at_zero(config, c, h)
        if abs(b - a) <= 1e-10 * abs(b):
            break
    return float(b)


def kappa_closed_form(config: MemoryConfig) -> float:
    """Algebraic reduction of the flat-delay condition.

    Expanding tau to O(omega^2) and cancelling the quadratic term gives

        kappa = (2 f2 / delta) * sqrt(3 (f1^2 + f3^2 + delta^2)),

    which reproduces the numeric root of solve_kappa.
    """
    config.require_symmetric("kappa_closed_form")
    fn = config.f_n
    return float(2 * fn[1] / config.delta * math.sqrt(3 * (fn[0] ** 2 + fn[2] ** 2 + config.delta**2)))


@dataclass(frozen=True)
class PlateauMetrics:
    """Flatness diagnostics of the phase-delay plateau."""

    tau0: float
    second_derivative_residual: float
    band_halfwidth: float
    curve: SpectralCurve  # relative delay tau(omega)/tau(0) for plotting

    def to_dict(self) -> dict:
        return {
            "tau0": self.tau0,
            "second_derivative_residual": self.second_derivative_residual,
            "band_halfwidth": self.band_halfwidth,
        }


def verify_plateau(
    config: MemoryConfig,
    k: float,
    fd_step: float | None = None,
    curve_grid=None,
) -> PlateauMetrics:
    """Measure tau(0), the residual band-center curvature and the 5% band.

    band_halfwidth is the largest omega (scanned at 1e-3 * delta resolution)
    below which |tau(omega)/tau(0) - 1| stays under 0.05.  The relative-delay
    curve is attached for plotting / CSV emission.
    """
    config.require_symmetric("verify_plateau")
    h = 1e-3 * config.delta if fd_step is None else fd_step
    tau0 = phase_delay(0.0, config, k)
    resid = _d2_tau_at_zero(config, k, h)

    scan = np.arange(1, 5001) * (1e-3 * config.delta)
    with np.errstate(invalid="ignore"):
        rel = phase_delay(scan, config, k) / tau0
    bad = np.nonzero(~(np.abs(rel - 1.0) < 0.05))[0]
    if len(bad) == 0:
        halfwidth = float(scan[-1])
    elif bad[0] == 0:
        halfwidth = 0.0
    else:
        halfwidth = float(scan[bad[0] - 1])

    if curve_grid is None:
        curve_grid = np.linspace(-2 * config.delta, 2 * config.delta, 1601)
    rel_curve = phase_delay(curve_grid, config, k) / tau0
    curve = SpectralCurve(np.asarray(curve_grid, float), rel_curve + 0j, "tau")
    return PlateauMetrics(
        tau0=float(tau0),
        second_derivative_residual=float(resid),
        band_halfwidth=halfwidth,
        curve=curve,
    )


@dataclass(frozen=True)
class DesignReport:
    """Everything produced by the two-step matching pipeline."""

    config: MemoryConfig
    target_pattern: tuple[int, ...]
    f_candidates: tuple[float, ...]
    kappa: float
    delta_prime: float
    revival_period: float
    plateau: PlateauMetrics

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "target_pattern": list(self.target_pattern),
            "f_candidates": list(self.f_candidates),
            "f": self.config.f,
            "kappa": self.kappa,
            "delta_prime": self.delta_prime,
            "revival_period": self.revival_period,
            "plateau_metrics": self.plateau.to_dict(),
        }


def design(weights, delta: float, ratio: int) -> DesignReport:
    """Run the full matching pipeline for a target pattern [-r, -1, 1, r].

    Chooses the largest f solution (the branch the reported optima lie on),
    solves for kappa, analyses the resulting k = 0 comb and verifies the
    phase-delay plateau.
    """
    candidates = solve_f(weights, delta, ratio)
    f = candidates[-1]
    config = MemoryConfig(delta=delta, coupling_weights=tuple(float(w) for w in weights), f=f)
    kappa = solve_kappa(config)
    config = replace(config, kappa0=kappa)

    report = eigenfreqs(config, 0.0)
    base, pattern = multiplet_base(report.real_parts())
    period = 2 * math.pi / base
    plateau = verify_plateau(config, kappa)
    return DesignReport(
        config=config,
        target_pattern=(-ratio, -1, 1, ratio),
        f_candidates=candidates,
        kappa=kappa,
        delta_prime=base,
        revival_period=period,
        plateau=plateau,
    )
