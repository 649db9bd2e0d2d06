"""Decoherence-protected transition search and the linewidth model.

A transition is protected where the magnitude of its effective gyromagnetic
ratio |d(nu)/dB| reaches a local minimum. The predicted inhomogeneous
linewidth folds the first- and second-order field dependence with a static
axial bath-field spread:

    dnu = sqrt((|gamma_eff| dB)^2 + (|C| dB^2 / 2)^2 + w0^2)

The default bath spread of 23.3 G is calibrated so an electron-type
transition (2.8 MHz/G) reproduces the 65.19 MHz reference linewidth, making
the narrowing factor epsilon = reference / dnu equal one for electron-type
transitions by construction. The floor w0 = 0.5 MHz caps epsilon near 130.
"""

from dataclasses import dataclass

import numpy as np

from .spinops import expectations, hermitian_eig
from .sweep import TrackedSpectrum, golden_minimize, manifold_label
from .system import SpinSystem, operators
from .transitions import (
    DEFAULT_KAPPA_MIN,
    drive_operator,
    pumped_density,
    transition_curve,
)

GAMMA_REFINE_TOL_G = 0.01
FWHM_TO_SIGMA = 2.0 * np.sqrt(2.0 * np.log(2.0))


@dataclass(frozen=True)
class LinewidthModel:
    bath_spread_g: float = 23.3
    floor_mhz: float = 0.5
    reference_mhz: float = 65.19

    def __post_init__(self):
        for name in ("bath_spread_g", "floor_mhz", "reference_mhz"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def predict_linewidth(
    gamma_eff_khz_per_g: float,
    curvature_khz_per_g2: float,
    model: LinewidthModel = LinewidthModel(),
) -> tuple[float, float]:
    """Predicted FWHM in MHz and narrowing factor epsilon for one transition."""
    g = abs(gamma_eff_khz_per_g) * 1e-3  # MHz/G
    c = abs(curvature_khz_per_g2) * 1e-3  # MHz/G^2
    db = model.bath_spread_g
    dnu = float(np.sqrt((g * db) ** 2 + (0.5 * c * db * db) ** 2 + model.floor_mhz**2))
    return dnu, model.reference_mhz / dnu


def epsilon_table(
    observed: list[tuple[float, float]], model: LinewidthModel = LinewidthModel()
) -> list[float]:
    """Narrowing factors reference/dnu for measured (nu, linewidth) pairs."""
    out = []
    for nu, dnu in observed:
        if dnu <= 0:
            raise ValueError(f"non-positive linewidth {dnu} for line at {nu} MHz")
        out.append(model.reference_mhz / dnu)
    return out


@dataclass(frozen=True)
class DptRecord:
    """A local minimum of |gamma_eff(B)| for one level pair."""

    level_i: int
    level_f: int
    b_opt: float
    nu_at_opt_mhz: float
    gamma_eff_khz_per_g: float
    curvature_khz_per_g2: float
    kappa_at_opt: float
    linewidth_mhz: float
    epsilon: float
    manifold_i: int | str
    manifold_f: int | str


def _sweep_pair_tables(tracked: TrackedSpectrum):
    """kappa and signed gamma_eff for every pair at every grid point."""
    ops = operators(tracked.system)
    rho = pumped_density(tracked.system)
    drive = drive_operator(ops)
    npts, dim = tracked.energies.shape
    kappa = np.empty((npts, dim, dim))
    slopes = np.empty((npts, dim))
    for k in range(npts):
        v = tracked.vectors[k]
        cross = np.abs(v.conj().T @ drive @ v)
        pops = expectations(rho, v)
        sz2s = expectations(ops.sz2, v)
        kappa[k] = cross * np.abs(pops[:, None] - pops[None, :]) * np.abs(
            sz2s[:, None] - sz2s[None, :]
        )
        slopes[k] = 1e3 * expectations(ops.h_zeeman, v)
    return kappa, slopes


def _gamma_at_field(system: SpinSystem, b: float, ref_vectors: np.ndarray, i: int, f: int):
    """|gamma_eff| of the pair at an off-grid field.

    The two levels are identified by best overlap with the reference
    eigenvectors from the nearest grid point.
    """
    ops = operators(system)
    sol = hermitian_eig(ops.h_static + b * ops.h_zeeman, observables=(ops.sz, ops.kz))
    slopes = 1e3 * expectations(ops.h_zeeman, sol.vectors)
    idx_i = int(np.argmax(np.abs(ref_vectors[:, i].conj() @ sol.vectors)))
    idx_f = int(np.argmax(np.abs(ref_vectors[:, f].conj() @ sol.vectors)))
    if idx_i == idx_f:
        return None
    return abs(float(slopes[idx_f] - slopes[idx_i]))


def scan_dpt(
    tracked: TrackedSpectrum,
    kappa_min: float = DEFAULT_KAPPA_MIN,
    b_range: tuple[float, float] | None = None,
    model: LinewidthModel = LinewidthModel(),
    observable_only: bool = False,
    refine_tol: float = GAMMA_REFINE_TOL_G,
) -> list[DptRecord]:
    """Locate protected transitions inside ``b_range``.

    Pairs qualify when their kappa exceeds ``kappa_min`` anywhere in the
    range; each interior local minimum of |gamma_eff(B)| is then bracketed
    on the grid and refined by golden-section search. Records come out
    sorted by |gamma_eff| ascending. ``observable_only`` additionally drops
    records whose kappa at the optimum is below ``kappa_min`` (the deepest
    minima have vanishing optical contrast and are otherwise kept).
    """
    b = tracked.b
    if b_range is None:
        b_range = (float(b[0]), float(b[-1]))
    lo, hi = b_range
    in_range = (b >= lo) & (b <= hi)
    if in_range.sum() < 3:
        raise ValueError(f"tracked spectrum has fewer than 3 points in [{lo}, {hi}] G")

    kappa, slopes = _sweep_pair_tables(tracked)
    sel = np.nonzero(in_range)[0]
    records = []
    dim = tracked.n_levels
    for i in range(dim):
        for f in range(i + 1, dim):
            if kappa[sel, i, f].max() < kappa_min:
                continue
            g = np.abs(slopes[:, f] - slopes[:, i])
            for k in sel:
                if k == 0 or k == len(b) - 1:
                    continue
                if not (g[k] < g[k - 1] and g[k] < g[k + 1]):
                    continue
                ref = tracked.vectors[k]

                def fun(x, ref=ref, i=i, f=f):
                    val = _gamma_at_field(tracked.system, x, ref, i, f)
                    return val if val is not None else g[k]

                b_opt, g_opt = golden_minimize(fun, float(b[k - 1]), float(b[k + 1]), refine_tol)
                nu, _, curvature = transition_curve(tracked, (i, f), b_opt)
                k_opt = int(np.argmin(np.abs(b - b_opt)))
                kappa_at_opt = float(kappa[k_opt, i, f])
                if observable_only and kappa_at_opt < kappa_min:
                    continue
                dnu, eps = predict_linewidth(g_opt, curvature, model)
                records.append(
                    DptRecord(
                        level_i=i,
                        level_f=f,
                        b_opt=float(b_opt),
                        nu_at_opt_mhz=float(abs(nu)),
                        gamma_eff_khz_per_g=float(g_opt),
                        curvature_khz_per_g2=float(curvature),
                        kappa_at_opt=kappa_at_opt,
                        linewidth_mhz=dnu,
                        epsilon=eps,
                        manifold_i=manifold_label(tracked.sz[k, i]),
                        manifold_f=manifold_label(tracked.sz[k, f]),
                    )
                )
    records.sort(key=lambda r: (abs(r.gamma_eff_khz_per_g), r.level_i, r.level_f))
    return records
