"""Eigenfrequency analysis of the resonator network.

The linear mode equations are written as dv/dt = -i H v for the state
v = (a, b_1 .. b_N) with the non-Hermitian dynamical matrix

    H[0, 0] = -i (k + gamma0) / 2
    H[n, n] = offset_n - i gamma_n / 2
    H[0, n] = H[n, 0] = f_n

Its eigenvalues are the complex eigenfrequencies: real parts oscillate,
negative imaginary parts decay.  For the disconnected (k = 0) lossless
symmetric network they reduce to the real roots of the storage quartic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import MemoryConfig


class IncommensurateError(ValueError):
    """No common frequency base found within tolerance."""


MERGE_TOL_SCALE = 1e-3  # pairwise real-part coalescence threshold, in units of delta


def dynamical_matrix(config: MemoryConfig, k: float) -> np.ndarray:
    n = config.n_modes
    H = np.zeros((n + 1, n + 1), dtype=complex)
    H[0, 0] = -0.5j * (k + config.gamma0)
    fn = config.f_n
    for i in range(n):
        H[i + 1, i + 1] = config.offsets[i] - 0.5j * config.gamma[i]
        H[0, i + 1] = fn[i]
        H[i + 1, 0] = fn[i]
    return H


def char_poly_storage(config: MemoryConfig) -> tuple[float, float, float]:
    """Even coefficients (c4, c2, c0) of the k = 0 storage quartic.

    P(w) = w^4 - (f1^2 + f2^2 + f3^2 + delta^2) w^2 + delta^2 f2^2; the odd
    coefficients vanish identically for the symmetric topology.
    """
    config.require_symmetric("char_poly_storage")
    fn = config.f_n
    c2 = -(np.sum(fn**2) + config.delta**2)
    c0 = config.delta**2 * fn[1] ** 2
    return (1.0, float(c2), float(c0))


def storage_roots(config: MemoryConfig) -> np.ndarray:
    """Real roots of the storage quartic via its companion matrix, sorted."""
    c4, c2, c0 = char_poly_storage(config)
    roots = np.roots([c4, 0.0, c2, 0.0, c0])
    return np.sort(roots.real)


@dataclass(frozen=True)
class EigenReport:
    """Complex eigenfrequencies at one coupling value plus comb diagnostics.

    ``base`` (the common frequency spacing), ``pattern``, ``multiplet_ratio``
    and ``revival_period`` are only present when the spectrum is real and a
    commensurate base exists; ``merged`` flags two real parts within the
    coalescence tolerance.
    """

    k_used: float
    frequencies: tuple[complex, ...]
    multiplet_ratio: float | None = None
    base: float | None = None
    pattern: tuple[int, ...] | None = None
    revival_period: float | None = None
    merged: bool = False

    def real_parts(self) -> np.ndarray:
        return np.array([f.real for f in self.frequencies])


def _sorted_eigvals(H: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvals(H)
    order = np.lexsort((lam.imag, lam.real))
    return lam[order]


def eigenfreqs(config: MemoryConfig, k: float) -> EigenReport:
    """Eigenfrequencies of the network at waveguide coupling k.

    When the spectrum is essentially real (lossless, k = 0) the commensurate
    base, integer pattern, positive-frequency ratio and revival period
    T = 2 pi / base are attached when they exist.
    """
    lam = _sorted_eigvals(dynamical_matrix(config, k))
    scale = max(1.0, float(np.max(np.abs(lam))))
    re = lam.real

    dists = [abs(re[i] - re[j]) for i in range(len(re)) for j in range(i + 1, len(re))]
    merged = bool(min(dists) < MERGE_TOL_SCALE * config.delta) if dists else False

    ratio = base = period = pattern = None
    if np.max(np.abs(lam.imag)) <= 1e-9 * scale:
        pos = np.sort(re[re > 1e-12 * scale])
        if len(pos) >= 2 and pos[0] > 0:
            ratio = float(pos[-1] / pos[0])
        if np.all(np.abs(re) > 1e-12 * scale):
            try:
                base, ipat = multiplet_base(re)
                pattern = ipat
                period = 2 * math.pi / base
            except IncommensurateError:
                pass
    return EigenReport(
        k_used=float(k),
        frequencies=tuple(lam),
        multiplet_ratio=ratio,
        base=base,
        pattern=pattern,
        revival_period=period,
        merged=merged,
    )


def multiplet_base(frequencies, tol: float = 1e-2, max_integer: int = 16):
    """Largest base so every frequency is an integer multiple within tol*base.

    Candidate bases are |f|_min / n for n = 1, 2, ...; for each candidate the
    integers are fixed by rounding, the base is refined by a least-squares
    fit through the origin, and the fit must hold to |f_i - m_i base| <=
    tol * base with all |m_i| <= max_integer.  The default integer bound is
    deliberately small: by Dirichlet approximation any frequency ratio fits
    some pattern once tol * max_integer nears 1 (sqrt(2) aliases onto 99/70
    at tol 1e-2), and a comb that revives only after dozens of base periods
    is not a usable storage comb.  Raise max_integer to screen higher-order
    patterns deliberately.
    """
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.size == 0:
        raise ValueError("no frequencies given")
    if np.any(freqs == 0):
        raise ValueError("multiplet_base requires nonzero frequencies")
    anchor = np.min(np.abs(freqs))
    for n in range(1, max_integer + 1):
        cand = anchor / n
        ints = np.round(freqs / cand)
        if np.any(np.abs(ints) > max_integer) or np.any(ints == 0):
            continue
        base = float(np.sum(ints * freqs) / np.sum(ints**2))
        if base <= 0:
            continue
        if np.all(np.abs(freqs - ints * base) <= tol * base):
            return base, tuple(int(i) for i in ints)
    raise IncommensurateError(
        f"no common base with integers <= {max_integer} fits {np.sort(freqs)} at tol {tol:g}"
    )


def revival_period(report: EigenReport) -> float:
    """T = 2 pi / base of a commensurate storage spectrum."""
    if report.base is None:
        raise ValueError("eigen report has no commensurate base; revival period undefined")
    return 2 * math.pi / report.base


@dataclass(frozen=True)
class MergeScan:
    """Coupling scan of the minimum pairwise real-part distance."""

    k_values: np.ndarray
    min_distance: np.ndarray
    eigenvalues: np.ndarray  # shape (steps, N+1), sorted by real part
    merge_point: float | None

    def __post_init__(self):
        for name in ("k_values", "min_distance", "eigenvalues"):
            arr = getattr(self, name)
            arr.flags.writeable = False


def _min_pair_distance(config: MemoryConfig, k: float) -> float:
    re = _sorted_eigvals(dynamical_matrix(config, k)).real
    return float(np.min(np.diff(np.sort(re))))


def scan_merge(config: MemoryConfig, k_min: float, k_max: float, steps: int) -> MergeScan:
    """Locate the coupling where two eigenfrequency real parts coalesce.

    The merge point is the smallest k at which the minimum pairwise distance
    first drops below 1e-3 * delta coming from above, refined by bisection.
    Spectra that start inside the tolerance (for example f = 0, where the
    common mode and a resonator share a real part at every k) report no
    merge: nothing coalesces.
    """
    if not k_min < k_max:
        raise ValueError(f"need k_min < k_max, got [{k_min}, {k_max}]")
    if steps < 2:
        raise ValueError(f"need at least 2 scan steps, got {steps}")
    ks = np.linspace(k_min, k_max, steps)
    eigs = np.empty((steps, config.n_modes + 1), dtype=complex)
    dist = np.empty(steps)
    for i, k in enumerate(ks):
        lam = _sorted_eigvals(dynamical_matrix(config, k))
        eigs[i] = lam
        dist[i] = np.min(np.diff(np.sort(lam.real)))

    tol = MERGE_TOL_SCALE * config.delta
    merge = None
    for i in range(1, steps):
        if dist[i - 1] >= tol and dist[i] < tol:
            lo, hi = ks[i - 1], ks[i]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if _min_pair_distance(config, mid) < tol:
                    hi = mid
                else:
                    lo = mid
            merge = 0.5 * (lo + hi)
            break
    return MergeScan(k_values=ks, min_distance=dist, eigenvalues=eigs, merge_point=merge)
