"""CW-ODMR spectrum synthesis and measured-peak assignment.

Lines are Gaussian (the lineshape measured resonances are usually fit
with) with amplitude proportional to kappa and FWHM taken from the
linewidth model, so synthesized intensities are relative, not absolute
contrast.
"""

from dataclasses import dataclass

import numpy as np

from .transitions import DEFAULT_KAPPA_MIN, TransitionRecord
from .zefoz import FWHM_TO_SIGMA, LinewidthModel, predict_linewidth

DEFAULT_ASSIGN_WINDOW_MHZ = 5.0


@dataclass
class SpectrumTrace:
    freq_mhz: np.ndarray
    intensity: np.ndarray
    b_gauss: float
    kappa_min: float
    model: LinewidthModel


@dataclass(frozen=True)
class MeasuredPeak:
    nu_mhz: float
    fwhm_mhz: float
    amplitude: float


@dataclass(frozen=True)
class PeakAssignment:
    peak: MeasuredPeak
    level_i: int | None
    level_f: int | None
    predicted_nu_mhz: float | None
    distance_mhz: float | None
    kappa: float | None

    @property
    def assigned(self) -> bool:
        return self.level_i is not None


def record_linewidth(record: TransitionRecord, model: LinewidthModel) -> float:
    """Model FWHM of one record; pairs without a defined slope get the floor."""
    gamma = record.gamma_eff_khz_per_g
    curvature = record.curvature_khz_per_g2
    if gamma is None:
        return model.floor_mhz
    dnu, _ = predict_linewidth(gamma, curvature if curvature is not None else 0.0, model)
    return dnu


def synthesize_spectrum(
    records: list[TransitionRecord],
    freq_axis_mhz: np.ndarray,
    model: LinewidthModel = LinewidthModel(),
    kappa_min: float = DEFAULT_KAPPA_MIN,
    b_gauss: float = float("nan"),
) -> SpectrumTrace:
    """Sum of Gaussian lines, one per record above the kappa threshold."""
    axis = np.asarray(freq_axis_mhz, dtype=float)
    if axis.size == 0:
        raise ValueError("frequency axis is empty")
    if axis.size > 1 and not np.all(np.diff(axis) > 0):
        raise ValueError("frequency axis must be strictly increasing")
    intensity = np.zeros_like(axis)
    kept = sorted(
        (r for r in records if r.kappa >= kappa_min and np.isfinite(r.nu_mhz)),
        key=lambda r: (r.nu_mhz, r.level_i, r.level_f),
    )
    for rec in kept:
        sigma = record_linewidth(rec, model) / FWHM_TO_SIGMA
        intensity += rec.kappa * np.exp(-((axis - rec.nu_mhz) ** 2) / (2 * sigma * sigma))
    b = b_gauss if not np.isnan(b_gauss) else (kept[0].b_gauss if kept else float("nan"))
    return SpectrumTrace(
        freq_mhz=axis, intensity=intensity, b_gauss=b, kappa_min=kappa_min, model=model
    )


def local_maxima(trace: SpectrumTrace, floor: float = 0.0) -> list[float]:
    """Frequencies of strict interior local maxima above ``floor``."""
    y = trace.intensity
    idx = np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]) & (y[1:-1] > floor))[0] + 1
    return [float(trace.freq_mhz[k]) for k in idx]


def assign_peaks(
    measured: list[MeasuredPeak],
    predicted: list[TransitionRecord],
    window_mhz: float = DEFAULT_ASSIGN_WINDOW_MHZ,
) -> list[PeakAssignment]:
    """Greedy peak-to-prediction assignment without reuse.

    Peaks are visited in descending measured amplitude; each takes the
    unclaimed prediction inside the window that maximizes
    kappa / (1 + |distance|). Unmatched peaks stay unassigned. The result
    does not depend on the ordering of the predicted list.
    """
    if window_mhz <= 0:
        raise ValueError("assignment window must be positive")
    pool = sorted(predicted, key=lambda r: (-r.kappa, r.nu_mhz, r.level_i, r.level_f))
    taken = [False] * len(pool)
    order = sorted(
        range(len(measured)), key=lambda k: (-measured[k].amplitude, measured[k].nu_mhz)
    )
    results: list[PeakAssignment | None] = [None] * len(measured)
    for k in order:
        peak = measured[k]
        best, best_score = None, -1.0
        for idx, rec in enumerate(pool):
            if taken[idx]:
                continue
            dist = abs(rec.nu_mhz - peak.nu_mhz)
            if dist > window_mhz:
                continue
            score = rec.kappa / (1.0 + dist)
            if score > best_score:
                best, best_score = idx, score
        if best is None:
            results[k] = PeakAssignment(peak, None, None, None, None, None)
        else:
            taken[best] = True
            rec = pool[best]
            results[k] = PeakAssignment(
                peak,
                rec.level_i,
                rec.level_f,
                rec.nu_mhz,
                abs(rec.nu_mhz - peak.nu_mhz),
                rec.kappa,
            )
    return results
