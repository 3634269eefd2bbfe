"""Frequency-domain response of the loaded resonator network.

The mini-resonators present a frequency-dependent self-energy chi(omega)
to the common mode; the waveguide sees the transfer function

    S(omega) = (k - gamma0 - 2 chi + 2 i omega) / (k + gamma0 + 2 chi - 2 i omega)

with the output-field convention a_out = sqrt(k) a - a_in.  The input-output
literature also uses a_out = a_in - sqrt(k) a, which flips the overall sign
of S; the lossless closed form s11_lossless follows that opposite convention,
so s11_lossless == -transfer_s on its domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MemoryConfig

CURVE_KINDS = ("chi", "S", "S11", "tau", "efficiency", "noise_gain")
_REAL_KINDS = ("tau", "efficiency", "noise_gain")


class PoleError(ValueError):
    """Evaluation exactly on a lossless resonance, where chi diverges."""


@dataclass(frozen=True)
class SpectralCurve:
    """A sampled response over a strictly increasing frequency grid."""

    omega_grid: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        # private copies, frozen: the curve never aliases caller arrays
        og = np.array(self.omega_grid, dtype=float)
        vals = np.array(self.values, dtype=complex)
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if og.shape != vals.shape or og.ndim != 1:
            raise ValueError("omega_grid and values must be 1-d arrays of equal length")
        if len(og) > 1 and not np.all(np.diff(og) > 0):
            raise ValueError("omega_grid must be strictly increasing")
        if self.kind in _REAL_KINDS and np.any(vals.imag != 0):
            raise ValueError(f"kind {self.kind!r} must have purely real values")
        og.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "omega_grid", og)
        object.__setattr__(self, "values", vals)

    @property
    def real_values(self) -> np.ndarray:
        return self.values.real


def _check_poles(omega: np.ndarray, config: MemoryConfig) -> None:
    # decoupled resonators (f_n = 0) contribute nothing and cannot diverge
    for f_n, o, g in zip(config.f_n, config.offsets, config.gamma):
        if g == 0.0 and f_n != 0.0:
            hit = omega == o
            if np.any(hit):
                bad = np.atleast_1d(omega)[np.atleast_1d(hit)]
                raise PoleError(
                    f"omega = {bad[0]:g} sits exactly on the lossless resonance at "
                    f"offset {o:g}; chi(omega) diverges there"
                )


def chi(omega, config: MemoryConfig):
    """Effective permittivity chi(omega) of the mini-resonator comb.

    Sum of Lorentzian terms with per-resonator decay:

        Re chi = sum_n f_n^2 (gamma_n/2) / ((gamma_n/2)^2 + (offset_n - omega)^2)
        Im chi = sum_n f_n^2 (omega - offset_n) / ((gamma_n/2)^2 + (offset_n - omega)^2)

    Raises PoleError when omega lands exactly on a zero-loss resonance.
    """
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    _check_poles(om, config)
    active = np.nonzero(config.f_n != 0)[0]
    if len(active) == 0:
        out = np.zeros_like(om, dtype=complex)
        return complex(out[0]) if scalar else out
    fn = config.f_n[active]
    offs = config.offsets_array[active]
    hg = config.gamma_array[active] / 2
    denom = hg[:, None] ** 2 + (offs[:, None] - om[None, :]) ** 2
    re = np.sum(fn[:, None] ** 2 * hg[:, None] / denom, axis=0)
    im = np.sum(fn[:, None] ** 2 * (om[None, :] - offs[:, None]) / denom, axis=0)
    out = re + 1j * im
    return complex(out[0]) if scalar else out


def transfer_s(omega, config: MemoryConfig, k: float):
    """Spectral transfer function S(omega) at waveguide coupling k.

    Lossless networks give |S| = 1 at every frequency; a critically coupled
    empty cavity (f = 0, gamma0 = k) gives S(0) = 0.
    """
    if k < 0:
        raise ValueError(f"waveguide coupling must be >= 0, got {k}")
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    x = chi(om, config)
    den = k + config.gamma0 + 2 * np.atleast_1d(x) - 2j * om
    small = np.abs(den) < 1e-14
    if np.any(small):
        raise PoleError(
            f"transfer function pole: denominator vanishes at omega = {om[small][0]:g} "
            "(fully lossless, decoupled limit)"
        )
    out = (k - config.gamma0 - 2 * np.atleast_1d(x) + 2j * om) / den
    return complex(out[0]) if scalar else out


def _cleared_numden(omega, config: MemoryConfig, k: float):
    """Numerator/denominator of S with chi's poles cleared.

    Multiplying through by prod_n (gamma_n/2 + i(offset_n - omega)) removes
    the removable singularities of the chi route, so S can be evaluated on
    grids that hit lossless resonances (where S -> -1).
    """
    om = np.asarray(omega, dtype=complex)
    om_flat = np.atleast_1d(om).reshape(-1)
    # decoupled (f_n = 0) resonators cancel out of S; dropping their factors
    # keeps the cleared form free of spurious 0/0 points
    active = np.nonzero(config.f_n != 0)[0]
    fn = config.f_n[active]
    offs = config.offsets_array[active]
    hg = config.gamma_array[active] / 2
    factors = hg[:, None] + 1j * (offs[:, None] - om_flat[None, :])
    D = np.prod(factors, axis=0) if len(active) else np.ones_like(om_flat)
    Nchi = np.zeros_like(om_flat)
    for n in range(len(fn)):
        others = np.prod(np.delete(factors, n, axis=0), axis=0)
        Nchi = Nchi + fn[n] ** 2 * others
    num = (k - config.gamma0 + 2j * om_flat) * D - 2 * Nchi
    den = (k + config.gamma0 - 2j * om_flat) * D + 2 * Nchi
    return num.reshape(om.shape), den.reshape(om.shape), D.reshape(om.shape)


def transfer_s_rational(omega, config: MemoryConfig, k: float):
    """S(omega) in pole-free rational form (equal to transfer_s off-pole).

    Genuinely undefined evaluations (fully lossless decoupled points, where
    numerator and denominator both vanish) come back as nan rather than an
    exception, so grid pipelines can report the offending frequency.
    """
    num, den, _ = _cleared_numden(omega, config, k)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / den
    return complex(out) if out.ndim == 0 else out


def noise_gain_rational(omega, config: MemoryConfig, k: float):
    """Noise-gain prefactor in the same cleared form (0 at lossless poles)."""
    _, den, D = _cleared_numden(omega, config, k)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 4 * k * config.gamma0 * np.abs(D) ** 2 / np.abs(den) ** 2
    return float(out) if out.ndim == 0 else out


def storage_poly(omega, config: MemoryConfig):
    """Quartic P(omega) of the disconnected symmetric network (see eigen)."""
    from .eigen import char_poly_storage

    c4, c2, c0 = char_poly_storage(config)
    om = np.asarray(omega, dtype=float)
    return c4 * om**4 + c2 * om**2 + c0


def s11_lossless(omega, config: MemoryConfig, k: float):
    """Closed-form reflection coefficient of the lossless symmetric network.

        S11 = -[k w (delta^2 - w^2) - 2 i P(w)] / [k w (delta^2 - w^2) + 2 i P(w)]

    Written in the opposite output-sign convention, so s11_lossless(omega)
    equals -transfer_s(omega) identically on its domain.
    """
    config.require_symmetric("s11_lossless")
    if not config.lossless:
        raise ValueError("s11_lossless requires all decay constants to be zero")
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    pref = k * om * (config.delta**2 - om**2)
    P = storage_poly(om, config)
    out = -(pref - 2j * P) / (pref + 2j * P)
    return complex(out[0]) if scalar else out


def phase_delay(omega, config: MemoryConfig, k: float):
    """Phase delay tau(omega) = (2/omega) arctan[k w (delta^2 - w^2) / (2 P(w))].

    The omega -> 0 limit is k delta^2 / P(0) = k / f2^2 (for delta = 1 units).
    At roots of P the arctan argument diverges and tau passes through
    +-pi/omega; the principal branch is returned.
    """
    config.require_symmetric("phase_delay")
    if not config.lossless:
        raise ValueError("phase_delay requires all decay constants to be zero")
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om).astype(float)
    out = np.empty_like(om)
    zero = om == 0.0
    f2 = config.f_n[1]
    if np.any(zero):
        if f2 == 0.0:
            raise ValueError("phase_delay at omega = 0 is undefined for f2 = 0")
        out[zero] = k * config.delta**2 / (config.delta**2 * f2**2)
    nz = ~zero
    if np.any(nz):
        o = om[nz]
        # at quartic roots the arctan argument passes through +-inf (tau is
        # finite); a 0/0 nan survives only in the degenerate f1 = f3 = 0 case
        # where a root coincides with +-delta
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = k * o * (config.delta**2 - o**2) / (2 * storage_poly(o, config))
        out[nz] = 2 / o * np.arctan(arg)
    return float(out[0]) if scalar else out


def efficiency_spectrum(grid, config: MemoryConfig, k: float) -> SpectralCurve:
    """E(omega) = |S(omega)|^2 sampled over an explicit grid."""
    grid = np.asarray(grid, dtype=float)
    if len(grid) > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("omega grid must be strictly increasing")
    s = transfer_s(grid, config, k)
    return SpectralCurve(grid, np.abs(s) ** 2 + 0j, "efficiency")


def noise_gain(omega, config: MemoryConfig, k: float):
    """Magnitude-squared prefactor of the intracavity noise in the output.

    |2 sqrt(k gamma0) / (k + gamma0 + 2 chi - 2 i omega)|^2 -- the
    deterministic factor multiplying the summed noise drive.  It vanishes
    with gamma0 and scales like 4 gamma0 / k for k >> gamma0.
    """
    if k < 0 or config.gamma0 < 0:
        raise ValueError("rates must be nonnegative")
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    x = np.atleast_1d(chi(om, config))
    den = k + config.gamma0 + 2 * x - 2j * om
    small = np.abs(den) < 1e-14
    if np.any(small):
        raise PoleError(f"noise gain pole at omega = {om[small][0]:g}")
    out = np.abs(2 * np.sqrt(k * config.gamma0) / den) ** 2
    return float(out[0]) if scalar else out


def sample_curve(kind: str, grid, config: MemoryConfig, k: float) -> SpectralCurve:
    """Build a SpectralCurve of the requested kind on an explicit grid."""
    grid = np.asarray(grid, dtype=float)
    if kind == "chi":
        vals = chi(grid, config)
    elif kind == "S":
        vals = transfer_s(grid, config, k)
    elif kind == "S11":
        vals = s11_lossless(grid, config, k)
    elif kind == "tau":
        vals = phase_delay(grid, config, k) + 0j
    elif kind == "efficiency":
        return efficiency_spectrum(grid, config, k)
    elif kind == "noise_gain":
        vals = noise_gain(grid, config, k) + 0j
    else:
        raise ValueError(f"unknown curve kind {kind!r}")
    return SpectralCurve(grid, np.asarray(vals), kind)
