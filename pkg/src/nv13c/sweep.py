"""Field sweeps: diagonalize across a grid, keep level identity through
avoided crossings, classify manifolds and locate level anti-crossings.

Trajectory labels are the integers 0..dim-1 fixed by ascending energy at the
first grid point. From one grid point to the next the labels follow the
globally optimal eigenvector-overlap assignment, solved exactly with the
Hungarian method on the |<v_i|v_j>|^2 matrix; a greedy match demonstrably
swaps labels at near-degeneracies.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .spinops import expectations, hermitian_eig
from .system import SpinSystem, build_hamiltonian, operators

MIXED = "mixed"
MANIFOLD_WINDOW = 0.4
OVERLAP_AMBIGUITY = 0.5
DEFAULT_STEP_G = 0.5
LAC_REFINE_TOL_G = 0.01
TRACK_START_MIN_G = 0.1


class AmbiguousTrackingError(RuntimeError):
    """Best assignment between neighbouring grid points is not trustworthy."""


class GridError(ValueError):
    """Invalid field grid."""


@dataclass(frozen=True)
class FieldGrid:
    """Uniform field grid in Gauss from b_start to b_end (inclusive-ish)."""

    b_start: float
    b_end: float
    step: float = DEFAULT_STEP_G

    def __post_init__(self):
        if not (self.b_start < self.b_end):
            raise GridError(f"b_start {self.b_start} must be below b_end {self.b_end}")
        if not (0 < self.step <= self.b_end - self.b_start):
            raise GridError(f"step {self.step} must be in (0, {self.b_end - self.b_start}]")

    def points(self) -> np.ndarray:
        """Grid points; a start at exactly 0 G is replaced by 0.1 G to stay
        clear of the degenerate zero-field subspaces."""
        n = int(np.floor((self.b_end - self.b_start) / self.step + 1e-9)) + 1
        pts = self.b_start + self.step * np.arange(n)
        if pts[0] == 0.0:
            pts = pts.copy()
            pts[0] = min(TRACK_START_MIN_G, self.step / 2)
        return pts


def manifold_label(sz_value: float) -> int | str:
    """Manifold from <Sz>: the nearest integer if within 0.4, else 'mixed'."""
    nearest = int(np.floor(sz_value + 0.5))
    if abs(sz_value - nearest) <= MANIFOLD_WINDOW:
        return nearest
    return MIXED


def classify_manifold(state: np.ndarray, sz_op: np.ndarray) -> int | str:
    """Manifold label of a normalized eigenvector."""
    sz = float(np.real(state.conj() @ (sz_op @ state)))
    return manifold_label(sz)


@dataclass
class TrackedSpectrum:
    """Labelled level trajectories across a field grid.

    Arrays are indexed [grid point, trajectory label]; ``vectors`` is
    [grid point, component, trajectory label]. At every grid point the
    trajectory energies are a permutation of the ascending eigenvalues.
    """

    system: SpinSystem
    b: np.ndarray
    energies: np.ndarray
    sz: np.ndarray
    kz: np.ndarray
    vectors: np.ndarray

    @property
    def n_levels(self) -> int:
        return self.energies.shape[1]

    def manifolds(self) -> np.ndarray:
        out = np.empty(self.energies.shape, dtype=object)
        for k in range(self.energies.shape[0]):
            for t in range(self.energies.shape[1]):
                out[k, t] = manifold_label(self.sz[k, t])
        return out

    def manifold_of(self, label: int) -> int | str:
        """Manifold of one trajectory from its median <Sz> over the sweep."""
        return manifold_label(float(np.median(self.sz[:, label])))

    def index(self, b_gauss: float) -> int:
        return int(np.argmin(np.abs(self.b - b_gauss)))

    def frequency(self, pair: tuple[int, int]) -> np.ndarray:
        i, j = pair
        return np.abs(self.energies[:, j] - self.energies[:, i])


def sweep_eigen(system: SpinSystem, grid: FieldGrid) -> TrackedSpectrum:
    """Diagonalize along the grid and thread levels by overlap assignment.

    Raises AmbiguousTrackingError when any matched pair of consecutive
    eigenvectors overlaps below 0.5 in magnitude; halving the grid step
    resolves such cases.
    """
    ops = operators(system)
    pts = grid.points()
    npts, dim = len(pts), system.dim
    energies = np.empty((npts, dim))
    sz = np.empty((npts, dim))
    kz = np.empty((npts, dim))
    vectors = np.empty((npts, dim, dim), dtype=complex)

    perm = np.arange(dim)
    prev_vectors = None
    for k, b in enumerate(pts):
        sol = hermitian_eig(
            ops.h_static + float(b) * ops.h_zeeman, observables=(ops.sz, ops.kz)
        )
        if prev_vectors is not None:
            overlap = np.abs(prev_vectors.conj().T @ sol.vectors)
            rows, cols = linear_sum_assignment(-(overlap**2))
            worst = overlap[rows, cols].min()
            if worst < OVERLAP_AMBIGUITY:
                raise AmbiguousTrackingError(
                    f"level tracking ambiguous between B = {pts[k - 1]:.4f} G and "
                    f"B = {b:.4f} G (weakest matched overlap {worst:.3f} < "
                    f"{OVERLAP_AMBIGUITY}); halve the sweep step"
                )
            mapping = np.empty(dim, dtype=int)
            mapping[rows] = cols
            perm = mapping[perm]
        energies[k] = sol.values[perm]
        vectors[k] = sol.vectors[:, perm]
        sz[k] = expectations(ops.sz, sol.vectors)[perm]
        kz[k] = expectations(ops.kz, sol.vectors)[perm]
        prev_vectors = sol.vectors
    return TrackedSpectrum(system=system, b=pts, energies=energies, sz=sz, kz=kz, vectors=vectors)


@dataclass(frozen=True)
class LacRecord:
    """One local minimum of a trajectory-pair gap."""

    level_i: int
    level_j: int
    b_star: float
    min_gap_mhz: float
    manifold_i: int | str
    manifold_j: int | str
    set_tag: str


def golden_minimize(f, a: float, b: float, tol: float):
    """Golden-section minimum of a unimodal f on [a, b] to width ``tol``."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    x = (a + b) / 2
    return x, f(x)


def _pair_gap_function(system: SpinSystem, rank_i: int, rank_j: int):
    """Gap between the eigenvalues at two fixed sorted positions."""

    def gap(b: float) -> float:
        h = build_hamiltonian(system, b)
        w = np.linalg.eigvalsh(h)
        return abs(w[rank_j] - w[rank_i])

    return gap


def _set_tag(m_i, m_j) -> str:
    pair = {m_i, m_j}
    if pair == {-1, 1}:
        return "set1"
    if pair == {-1, 0}:
        return "set2"
    return "other"


def find_lacs(tracked: TrackedSpectrum, refine_tol: float = LAC_REFINE_TOL_G) -> list[LacRecord]:
    """Locate gap minima of trajectory pairs that become adjacent in energy.

    Each interior minimum on the grid is refined by golden-section search on
    the exact gap function (fresh diagonalizations) to ``refine_tol`` Gauss.
    Records are tagged set1 when the pair's manifolds are {-1, +1}, set2 for
    {-1, 0}, other otherwise.
    """
    if len(tracked.b) < 3:
        raise GridError("need at least 3 grid points to bracket a gap minimum")
    ranks = np.argsort(np.argsort(tracked.energies, axis=1), axis=1)
    n = tracked.n_levels
    records = []
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = np.abs(ranks[:, i] - ranks[:, j]) == 1
            if not adjacent.any():
                continue
            gap = np.abs(tracked.energies[:, j] - tracked.energies[:, i])
            interior = np.nonzero(
                (gap[1:-1] < gap[:-2]) & (gap[1:-1] < gap[2:])
            )[0] + 1
            for k in interior:
                if not adjacent[k]:
                    continue
                lo = float(tracked.b[k - 1])
                hi = float(tracked.b[k + 1])
                rank_i = int(min(ranks[k, i], ranks[k, j]))
                rank_j = int(max(ranks[k, i], ranks[k, j]))
                f = _pair_gap_function(tracked.system, rank_i, rank_j)
                b_star, min_gap = golden_minimize(f, lo, hi, refine_tol)
                m_i = manifold_label(tracked.sz[k, i])
                m_j = manifold_label(tracked.sz[k, j])
                records.append(
                    LacRecord(
                        level_i=i,
                        level_j=j,
                        b_star=b_star,
                        min_gap_mhz=min_gap,
                        manifold_i=m_i,
                        manifold_j=m_j,
                        set_tag=_set_tag(m_i, m_j),
                    )
                )
    records.sort(key=lambda r: (r.b_star, r.level_i, r.level_j))
    return records
