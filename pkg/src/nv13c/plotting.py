"""Figure rendering for the CLI report path.

Every function draws to a file and returns the path; nothing opens a
window. Colors follow manifold membership so the sweep figure reads like
the usual eigenvalue-vs-field diagram.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectra import SpectrumTrace
from .sweep import LacRecord, TrackedSpectrum
from .transitions import TransitionRecord
from .zefoz import DptRecord

MANIFOLD_COLORS = {0: "tab:blue", -1: "tab:red", 1: "tab:green", "mixed": "tab:gray"}


def _finish(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_sweep(tracked: TrackedSpectrum, path: str) -> str:
    """Level energies against field, colored by manifold."""
    fig, ax = plt.subplots(figsize=(8, 5))
    for t in range(tracked.n_levels):
        color = MANIFOLD_COLORS.get(tracked.manifold_of(t), "tab:gray")
        ax.plot(tracked.b, tracked.energies[:, t], lw=0.8, color=color)
    ax.set_xlabel("magnetic field (G)")
    ax.set_ylabel("energy (MHz)")
    ax.set_title("eigenlevels vs axial field")
    return _finish(fig, path)


def plot_spectrum(trace: SpectrumTrace, path: str) -> str:
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(trace.freq_mhz, trace.intensity, lw=1.0, color="tab:blue")
    ax.set_xlabel("microwave frequency (MHz)")
    ax.set_ylabel("relative intensity")
    label = f"B = {trace.b_gauss:g} G" if np.isfinite(trace.b_gauss) else "spectrum"
    ax.set_title(f"synthesized CW-ODMR spectrum, {label}")
    return _finish(fig, path)


def plot_transitions(records: list[TransitionRecord], path: str) -> str:
    """Stem-style view of kappa against transition frequency."""
    fig, ax = plt.subplots(figsize=(8, 4))
    for rec in records:
        same = rec.manifold_i == rec.manifold_f == 0
        color = "tab:green" if same else "tab:gray"
        ax.plot([rec.nu_mhz, rec.nu_mhz], [0, rec.kappa], lw=1.0, color=color)
    ax.set_yscale("log")
    ax.set_xlabel("transition frequency (MHz)")
    ax.set_ylabel("kappa")
    if records:
        ax.set_title(f"predicted transitions at B = {records[0].b_gauss:g} G")
    return _finish(fig, path)


def plot_dpt(records: list[DptRecord], path: str) -> str:
    fig, ax = plt.subplots(figsize=(8, 4))
    if records:
        b = [r.b_opt for r in records]
        g = [abs(r.gamma_eff_khz_per_g) for r in records]
        kappa = [max(r.kappa_at_opt, 1e-12) for r in records]
        sc = ax.scatter(b, g, c=np.log10(kappa), cmap="viridis", s=25)
        fig.colorbar(sc, ax=ax, label="log10 kappa at optimum")
    ax.set_xlabel("field at minimum (G)")
    ax.set_ylabel("|gamma_eff| (kHz/G)")
    ax.set_title("protected-transition slope minima")
    return _finish(fig, path)


def plot_lacs(tracked: TrackedSpectrum, records: list[LacRecord], path: str) -> str:
    fig, ax = plt.subplots(figsize=(8, 5))
    for t in range(tracked.n_levels):
        color = MANIFOLD_COLORS.get(tracked.manifold_of(t), "tab:gray")
        ax.plot(tracked.b, tracked.energies[:, t], lw=0.8, color=color)
    for rec in records:
        k = tracked.index(rec.b_star)
        y = (tracked.energies[k, rec.level_i] + tracked.energies[k, rec.level_j]) / 2
        ax.plot(rec.b_star, y, "kx", ms=6)
    ax.set_xlabel("magnetic field (G)")
    ax.set_ylabel("energy (MHz)")
    ax.set_title("level anti-crossings (x marks gap minima)")
    return _finish(fig, path)
