"""Delimited-output writers and readers.

All writers are atomic (temp file in the target directory, then rename) and
format floats with repr so identical inputs produce identical bytes and
round-trips through CSV lose nothing.
"""

import csv
import json
import os
import tempfile

import numpy as np

from .spectra import MeasuredPeak, SpectrumTrace
from .sweep import LacRecord, TrackedSpectrum
from .transitions import TransitionRecord
from .zefoz import DptRecord

SWEEP_COLUMNS = ["b_gauss", "level_label", "energy_mhz", "sz_expect", "kz_expect", "manifold"]
TRANSITION_COLUMNS = [
    "b_gauss",
    "level_i",
    "level_f",
    "nu_mhz",
    "tme",
    "d_pop",
    "d_sz2",
    "kappa",
    "gamma_eff_khz_per_g",
    "curvature_khz_per_g2",
    "manifold_i",
    "manifold_f",
]
EIGEN_COLUMNS = ["level", "energy_mhz", "sz_expect", "kz_expect", "manifold"]
LAC_COLUMNS = ["level_i", "level_j", "b_star_gauss", "min_gap_mhz", "manifold_i", "manifold_j", "set"]
SPECTRUM_COLUMNS = ["freq_mhz", "intensity"]
DPT_COLUMNS = [
    "level_i",
    "level_f",
    "b_opt_gauss",
    "nu_mhz",
    "gamma_eff_khz_per_g",
    "curvature_khz_per_g2",
    "kappa",
    "linewidth_mhz",
    "epsilon",
    "manifold_i",
    "manifold_f",
]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _atomic_write(path: str, write_fn):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".nv13c-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows):
    def _write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])

    _atomic_write(path, _write)


def write_json(path: str, payload):
    _atomic_write(path, lambda fh: (json.dump(payload, fh, indent=2), fh.write("\n")))


def sweep_rows(tracked: TrackedSpectrum):
    manifolds = tracked.manifolds()
    for k in range(len(tracked.b)):
        for t in range(tracked.n_levels):
            yield (
                tracked.b[k],
                t,
                tracked.energies[k, t],
                tracked.sz[k, t],
                tracked.kz[k, t],
                manifolds[k, t],
            )


def transition_row(rec: TransitionRecord):
    return (
        rec.b_gauss,
        rec.level_i,
        rec.level_f,
        rec.nu_mhz,
        rec.tme,
        rec.d_pop,
        rec.d_sz2,
        rec.kappa,
        rec.gamma_eff_khz_per_g,
        rec.curvature_khz_per_g2,
        rec.manifold_i,
        rec.manifold_f,
    )


def transition_dict(rec: TransitionRecord) -> dict:
    return {k: getattr(rec, _FIELD_BY_COLUMN[k]) for k in TRANSITION_COLUMNS}


_FIELD_BY_COLUMN = {
    "b_gauss": "b_gauss",
    "level_i": "level_i",
    "level_f": "level_f",
    "nu_mhz": "nu_mhz",
    "tme": "tme",
    "d_pop": "d_pop",
    "d_sz2": "d_sz2",
    "kappa": "kappa",
    "gamma_eff_khz_per_g": "gamma_eff_khz_per_g",
    "curvature_khz_per_g2": "curvature_khz_per_g2",
    "manifold_i": "manifold_i",
    "manifold_f": "manifold_f",
}


def _parse_manifold(text: str):
    return int(text) if text.lstrip("+-").isdigit() else text


def read_transitions_csv(path: str) -> list[TransitionRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRANSITION_COLUMNS:
            raise ValueError(
                f"{path}: expected transition columns {TRANSITION_COLUMNS}, "
                f"got {reader.fieldnames}"
            )
        records = []
        for row in reader:
            records.append(
                TransitionRecord(
                    b_gauss=float(row["b_gauss"]),
                    level_i=int(row["level_i"]),
                    level_f=int(row["level_f"]),
                    nu_mhz=float(row["nu_mhz"]),
                    tme=float(row["tme"]),
                    d_pop=float(row["d_pop"]),
                    d_sz2=float(row["d_sz2"]),
                    kappa=float(row["kappa"]),
                    gamma_eff_khz_per_g=(
                        float(row["gamma_eff_khz_per_g"]) if row["gamma_eff_khz_per_g"] else None
                    ),
                    curvature_khz_per_g2=(
                        float(row["curvature_khz_per_g2"]) if row["curvature_khz_per_g2"] else None
                    ),
                    manifold_i=_parse_manifold(row["manifold_i"]),
                    manifold_f=_parse_manifold(row["manifold_f"]),
                )
            )
    return records


def read_transitions_json(path: str) -> list[TransitionRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return [TransitionRecord(**entry) for entry in payload]


def read_peaks_csv(path: str) -> list[MeasuredPeak]:
    """Measured-peak input: columns nu_mhz, fwhm_mhz, amplitude."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["nu_mhz", "fwhm_mhz", "amplitude"]
        if reader.fieldnames != expected:
            raise ValueError(f"{path}: expected peak columns {expected}, got {reader.fieldnames}")
        return [
            MeasuredPeak(
                nu_mhz=float(row["nu_mhz"]),
                fwhm_mhz=float(row["fwhm_mhz"]),
                amplitude=float(row["amplitude"]),
            )
            for row in reader
        ]


def lac_row(rec: LacRecord):
    return (
        rec.level_i,
        rec.level_j,
        rec.b_star,
        rec.min_gap_mhz,
        rec.manifold_i,
        rec.manifold_j,
        rec.set_tag,
    )


def dpt_row(rec: DptRecord):
    return (
        rec.level_i,
        rec.level_f,
        rec.b_opt,
        rec.nu_at_opt_mhz,
        rec.gamma_eff_khz_per_g,
        rec.curvature_khz_per_g2,
        rec.kappa_at_opt,
        rec.linewidth_mhz,
        rec.epsilon,
        rec.manifold_i,
        rec.manifold_f,
    )


def dpt_dict(rec: DptRecord) -> dict:
    return dict(zip(DPT_COLUMNS, dpt_row(rec)))


def spectrum_rows(trace: SpectrumTrace):
    for f, y in zip(trace.freq_mhz, trace.intensity):
        yield (f, y)


def assignment_dict(assignment) -> dict:
    return {
        "peak": {
            "nu_mhz": assignment.peak.nu_mhz,
            "fwhm_mhz": assignment.peak.fwhm_mhz,
            "amplitude": assignment.peak.amplitude,
        },
        "assigned": assignment.assigned,
        "level_i": assignment.level_i,
        "level_f": assignment.level_f,
        "predicted_nu_mhz": assignment.predicted_nu_mhz,
        "distance_mhz": assignment.distance_mhz,
        "kappa": assignment.kappa,
    }
