"""Figure rendering for the CLI report path.

All renderers draw simple line charts with matplotlib (Agg backend) and
write straight to file; the CSV next to each figure stays the
authoritative record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _new_axes(xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def render_spectrum(path, omega, efficiency, tau_rel, noise):
    fig, ax = _new_axes(r"$\omega$", "response")
    ax.plot(omega, efficiency, label=r"$E(\omega)=|S|^2$")
    finite = np.isfinite(tau_rel)
    ax.plot(omega[finite], tau_rel[finite], label=r"$\tau_r(\omega)$")
    if np.any(noise > 0):
        ax.plot(omega, noise, label="noise gain")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_eigen_scan(path, k_values, eigenvalues, merge_point=None):
    fig, ax = _new_axes("k", r"Re $\omega_n$")
    for j in range(eigenvalues.shape[1]):
        ax.plot(k_values, eigenvalues[:, j].real, lw=1.2)
    if merge_point is not None:
        ax.axvline(merge_point, color="k", ls="--", lw=0.8)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_tau_r(path, omega, tau_rel):
    fig, ax = _new_axes(r"$\omega$", r"$\tau(\omega)/\tau(0)$")
    ax.plot(omega, tau_rel)
    ax.axhline(1.05, color="k", ls=":", lw=0.7)
    ax.axhline(0.95, color="k", ls=":", lw=0.7)
    ax.set_ylim(0, 2)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_echo(path, t, J, k_of_t, a_in_peak2, a_in=None):
    # thin long runs for the figure only; the CSV keeps every sample
    stride = max(1, len(t) // 4000)
    t, J, k_of_t = t[::stride], J[::stride], k_of_t[::stride]
    fig, ax = _new_axes("t", "J(t)")
    if k_of_t.max() > 0 and np.any(k_of_t == 0):
        ax.fill_between(t, 0, 1.05, where=k_of_t == 0, color="0.9", label="stored (k=0)")
    ax.plot(t, J, label="output")
    if a_in is not None:
        ax.plot(t, np.abs(a_in[::stride]) ** 2 / a_in_peak2, ls="--", lw=0.9, label="input")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
