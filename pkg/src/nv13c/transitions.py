"""Transition enumeration and observability scoring.

For every ordered level pair (i below f in energy) the intensity factor is

    kappa = |TME| * |d_pop| * |d_sz2|

where TME is the gyromagnetic-ratio-weighted matrix element of all electron
and total-nuclear angular-momentum projections between the two eigenstates,
d_pop is the population difference under the optically pumped density matrix
and d_sz2 is the optical-contrast difference of <Sz^2>. Magnitudes enter the
product; the signed components are kept on the record. An optional squared
convention (|TME|^2) is exposed for calibration studies.

The pumped density matrix spreads all population uniformly over the
m_S = 0 sublevels (projector onto m_S = 0 times the nuclear identity,
normalized to unit trace), leaving the nuclei unpolarized.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .spinops import expectation, expectations
from .sweep import TrackedSpectrum, manifold_label
from .system import SpinSystem, SystemOperators, eigensolve, operators

DEGENERACY_GAP_MHZ = 1e-6
DEFAULT_KAPPA_MIN = 1e-6
DEFAULT_FIT_WINDOW_G = 20.0


class DegenerateLevelError(ValueError):
    """First-order slope undefined for a degenerate eigenstate."""


class FitWindowError(ValueError):
    """Quadratic-fit window outside the tracked range or too few points."""


def pumped_density(system: SpinSystem) -> np.ndarray:
    """Density matrix after optical pumping: m_S = 0 projector, unit trace."""
    if round(2 * system.electron.spin) != 2:
        raise ValueError("optical pumping model requires an electron spin of 1")
    ops = operators(system)
    dim = system.dim
    diag_sz = np.real(np.diag(ops.sz))
    proj = np.diag((np.abs(diag_sz) < 1e-12).astype(complex))
    return proj / np.trace(proj).real


def drive_operator(ops: SystemOperators) -> np.ndarray:
    """Gyromagnetic-ratio-weighted sum of all angular-momentum projections.

    The microwave orientation is unknown, so every projection of the
    electron and nuclear spins contributes. Nuclear ratios are converted
    from kHz/G to MHz/G so the operator is uniformly MHz/G-weighted.
    """
    system = ops.system
    op = system.electron.gamma_e_mhz_per_g * (ops.sx + ops.sy + ops.sz)
    for nuc, (inx, iny, inz) in zip(system.nuclei, ops.nuclear):
        op = op + 1e-3 * nuc.gamma_n_khz_per_g * (inx + iny + inz)
    return op


def transition_matrix_element(
    f_state: np.ndarray,
    i_state: np.ndarray,
    ops: SystemOperators,
    squared: bool = False,
) -> float:
    """|<f|O|i>| for the drive operator O; phase-convention independent."""
    value = abs(np.vdot(f_state, drive_operator(ops) @ i_state))
    return value * value if squared else value


@dataclass(frozen=True)
class IntensityFactors:
    tme: float
    d_pop: float
    d_sz2: float
    kappa: float


def transition_intensity(
    f_state: np.ndarray,
    i_state: np.ndarray,
    rho: np.ndarray,
    ops: SystemOperators,
    squared: bool = False,
) -> IntensityFactors:
    """kappa and its three factors for one eigenstate pair."""
    tme = transition_matrix_element(f_state, i_state, ops, squared=squared)
    d_pop = expectation(rho, f_state) - expectation(rho, i_state)
    d_sz2 = expectation(ops.sz2, f_state) - expectation(ops.sz2, i_state)
    return IntensityFactors(
        tme=tme, d_pop=d_pop, d_sz2=d_sz2, kappa=tme * abs(d_pop) * abs(d_sz2)
    )


def _zeeman_slopes_khz_per_g(ops: SystemOperators, vectors: np.ndarray) -> np.ndarray:
    """First-order energy slopes dE/dB of all eigenstates, in kHz/G."""
    return 1e3 * expectations(ops.h_zeeman, vectors)


def gamma_eff_hellmann_feynman(
    f_index: int,
    i_index: int,
    values: np.ndarray,
    vectors: np.ndarray,
    ops: SystemOperators,
    gap_tol_mhz: float = DEGENERACY_GAP_MHZ,
) -> float:
    """Signed transition slope d(nu)/dB in kHz/G by first-order perturbation.

    Requires both eigenstates to be separated from their nearest neighbours
    by more than ``gap_tol_mhz``; otherwise the slope of an individual level
    is undefined and the caller must fall back to the finite-difference fit
    on tracked trajectories.
    """
    for idx in (f_index, i_index):
        gaps = np.abs(values - values[idx])
        gaps[idx] = np.inf
        if gaps.min() <= gap_tol_mhz:
            raise DegenerateLevelError(
                f"level {idx} is degenerate within {gap_tol_mhz} MHz; "
                "use the quadratic-fit slope on tracked trajectories"
            )
    slopes = _zeeman_slopes_khz_per_g(ops, vectors[:, [i_index, f_index]])
    return float(slopes[1] - slopes[0])


def quadratic_curve_fit(
    b_points: np.ndarray, nu_points: np.ndarray, b0: float
) -> tuple[float, float, float]:
    """Least-squares quadratic of nu(B) about b0.

    Returns (nu at b0 in MHz, slope in kHz/G, curvature d2nu/dB2 in kHz/G^2).
    """
    x = np.asarray(b_points, dtype=float) - b0
    coeffs = npoly.polyfit(x, np.asarray(nu_points, dtype=float), 2)
    return float(coeffs[0]), float(coeffs[1] * 1e3), float(2.0 * coeffs[2] * 1e3)


def transition_curve(
    tracked: TrackedSpectrum,
    pair: tuple[int, int],
    b_gauss: float,
    window_g: float = DEFAULT_FIT_WINDOW_G,
) -> tuple[float, float, float]:
    """Quadratic fit of one pair's transition frequency around ``b_gauss``."""
    if not (tracked.b[0] <= b_gauss <= tracked.b[-1]):
        raise FitWindowError(
            f"B = {b_gauss} G outside tracked range [{tracked.b[0]}, {tracked.b[-1]}] G"
        )
    mask = np.abs(tracked.b - b_gauss) <= window_g / 2
    if mask.sum() < 5:
        raise FitWindowError(
            f"only {int(mask.sum())} grid points inside the {window_g} G window; need >= 5"
        )
    nu = tracked.frequency(pair)[mask]
    return quadratic_curve_fit(tracked.b[mask], nu, b_gauss)


@dataclass(frozen=True)
class TransitionRecord:
    """One level pair at a fixed field with its observability scores."""

    b_gauss: float
    level_i: int
    level_f: int
    nu_mhz: float
    tme: float
    d_pop: float
    d_sz2: float
    kappa: float
    gamma_eff_khz_per_g: float | None
    curvature_khz_per_g2: float | None
    manifold_i: int | str
    manifold_f: int | str


def enumerate_transitions(
    system: SpinSystem,
    b_gauss: float,
    kappa_min: float = 0.0,
    fmin_mhz: float = 0.0,
    fmax_mhz: float = np.inf,
    tme_squared: bool = False,
) -> list[TransitionRecord]:
    """Score every level pair at one field, ordered by frequency.

    ``kappa_min``/``fmin``/``fmax`` filter the output; the full pair set is
    the default. Degenerate pairs carry no Hellmann-Feynman slope.
    """
    ops = operators(system)
    sol, sz, _ = eigensolve(system, b_gauss)
    rho = pumped_density(system)
    dim = system.dim

    drive = drive_operator(ops)
    cross = np.abs(sol.vectors.conj().T @ drive @ sol.vectors)
    pops = expectations(rho, sol.vectors)
    sz2s = expectations(ops.sz2, sol.vectors)
    slopes = _zeeman_slopes_khz_per_g(ops, sol.vectors)
    gaps = np.abs(sol.values[:, None] - sol.values[None, :])
    np.fill_diagonal(gaps, np.inf)
    isolated = gaps.min(axis=1) > DEGENERACY_GAP_MHZ

    records = []
    for i in range(dim):
        for f in range(i + 1, dim):
            nu = sol.values[f] - sol.values[i]
            if not (fmin_mhz <= nu <= fmax_mhz):
                continue
            tme = cross[f, i] ** 2 if tme_squared else cross[f, i]
            d_pop = pops[f] - pops[i]
            d_sz2 = sz2s[f] - sz2s[i]
            kappa = tme * abs(d_pop) * abs(d_sz2)
            if kappa < kappa_min:
                continue
            gamma = float(slopes[f] - slopes[i]) if isolated[i] and isolated[f] else None
            records.append(
                TransitionRecord(
                    b_gauss=float(b_gauss),
                    level_i=i,
                    level_f=f,
                    nu_mhz=float(nu),
                    tme=float(tme),
                    d_pop=float(d_pop),
                    d_sz2=float(d_sz2),
                    kappa=float(kappa),
                    gamma_eff_khz_per_g=gamma,
                    curvature_khz_per_g2=None,
                    manifold_i=manifold_label(sz[i]),
                    manifold_f=manifold_label(sz[f]),
                )
            )
    records.sort(key=lambda r: (r.nu_mhz, r.level_i, r.level_f))
    return records
