"""Angular-momentum operators, Kronecker embedding, tensor rotation and a
deterministic Hermitian eigensolver.

All matrices are dense complex numpy arrays. Energies are in MHz throughout
the package; the operators themselves are dimensionless.
"""

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-12
DEGENERACY_TOL_MHZ = 1e-9


class SpinValueError(ValueError):
    """Invalid spin quantum number."""


class NonHermitianError(ValueError):
    """Matrix handed to the eigensolver is not Hermitian within tolerance."""


class EigensolverError(RuntimeError):
    """The eigensolver failed to converge (a solver bug, not a user error)."""


@dataclass(frozen=True)
class SpinOperators:
    """Spin matrices for one particle of spin ``s``.

    ``sz`` is diagonal with entries s, s-1, ..., -s; ``sx``/``sy`` follow the
    standard ladder-operator construction, so [sx, sy] = i sz (and cyclic)
    and sx^2 + sy^2 + sz^2 = s(s+1) * identity.
    """

    s: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    s2: np.ndarray

    @property
    def dim(self) -> int:
        return self.sz.shape[0]


def spin_matrices(s: float) -> SpinOperators:
    """Build the spin matrices for a half-integer spin ``s`` >= 0."""
    two_s = 2 * s
    if s < 0 or abs(two_s - round(two_s)) > 1e-12:
        raise SpinValueError(f"spin must be a non-negative half-integer, got {s}")
    n = int(round(two_s)) + 1
    m = s - np.arange(n)  # s, s-1, ..., -s
    sz = np.diag(m).astype(complex)
    sp = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        sp[k, k + 1] = np.sqrt(s * (s + 1) - m[k + 1] * (m[k + 1] + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    s2 = sx @ sx + sy @ sy + sz @ sz
    return SpinOperators(s=s, sx=sx, sy=sy, sz=sz, s2=s2)


def embed(op: np.ndarray, slot: int, dims: list[int]) -> np.ndarray:
    """Embed ``op`` acting on subspace ``slot`` into the product space ``dims``.

    Identity acts on every other slot; the result has dimension prod(dims).
    """
    op = np.asarray(op, dtype=complex)
    if not 0 <= slot < len(dims):
        raise IndexError(f"slot {slot} outside dims of length {len(dims)}")
    if op.shape != (dims[slot], dims[slot]):
        raise ValueError(
            f"operator is {op.shape}, but slot {slot} has dimension {dims[slot]}"
        )
    out = np.eye(1, dtype=complex)
    for k, d in enumerate(dims):
        out = np.kron(out, op if k == slot else np.eye(d, dtype=complex))
    return out


def rotation_about_z(phi: float) -> np.ndarray:
    """3x3 spatial rotation matrix about the z axis by ``phi`` radians."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotate_tensor(tensor: np.ndarray, phi: float) -> np.ndarray:
    """Rotate a rank-2 coupling tensor about z: R(phi) . tensor . R(phi)^T.

    Symmetry is preserved and the zz element is unchanged. Conjugating a
    bilinear spin coupling by the corresponding spin-space rotation produces
    exactly this tensor transformation, so rotating the tensor is the
    spectrum-identical way to place equivalent nuclei at different azimuths.
    """
    r = rotation_about_z(phi)
    return r @ np.asarray(tensor, dtype=float) @ r.T


@dataclass
class EigenSolution:
    """Eigenvalues (ascending, MHz) and orthonormal eigenvectors (columns).

    ``manifolds`` is filled in by callers that know the electron-spin
    operators; it stays None at this level.
    """

    values: np.ndarray
    vectors: np.ndarray
    manifolds: list | None = field(default=None)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real and positive.

    Ties on magnitude resolve to the lowest row index, which keeps the
    convention deterministic.
    """
    out = vectors.copy()
    for k in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, k])))
        pivot = out[idx, k]
        if abs(pivot) > 0:
            out[:, k] *= np.conj(pivot) / abs(pivot)
    return out


def _degenerate_blocks(values: np.ndarray, tol: float):
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] > tol:
            yield start, k
            start = k


def _canonicalize_block(block: np.ndarray, observables) -> np.ndarray:
    """Fix the basis inside a degenerate block.

    The block is rotated to diagonalize the first observable restricted to
    it, sorted by descending expectation value; sub-blocks still degenerate
    in that observable recurse on the remaining observables. A final QR pass
    guards orthonormality against roundoff.
    """
    if block.shape[1] < 2 or not observables:
        return block
    obs, rest = observables[0], observables[1:]
    sub = block.conj().T @ obs @ block
    sub = (sub + sub.conj().T) / 2
    w, u = np.linalg.eigh(sub)  # ascending
    order = np.argsort(-w, kind="stable")
    w, u = w[order], u[:, order]
    rotated = block @ u
    for lo, hi in _degenerate_blocks(-w, 1e-9):  # groups of equal <obs>
        if hi - lo >= 2:
            rotated[:, lo:hi] = _canonicalize_block(rotated[:, lo:hi], rest)
    q, r = np.linalg.qr(rotated)
    q *= np.sign(np.real(np.diag(r)))[np.newaxis, :]
    return q


def hermitian_eig(
    m: np.ndarray,
    observables: tuple[np.ndarray, ...] = (),
    degeneracy_tol: float = DEGENERACY_TOL_MHZ,
    hermiticity_tol: float = HERMITICITY_TOL,
) -> EigenSolution:
    """Diagonalize a Hermitian matrix with a reproducible output convention.

    Eigenvalues come out ascending. Within any degenerate cluster
    (eigenvalue spacing below ``degeneracy_tol``) the eigenvectors are
    re-orthogonalized and canonicalized by diagonalizing the supplied
    ``observables`` in priority order, sorted by descending expectation
    value. Every eigenvector's largest-magnitude component is made real and
    positive. This pins the output bit-for-bit at points of exact
    degeneracy, e.g. a zero-field spectrum full of Kramers doublets.

    Raises NonHermitianError if ``max|M - M^dagger|`` exceeds
    ``hermiticity_tol`` relative to the largest entry, and EigensolverError
    if the underlying solver fails to converge.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(np.abs(m).max(), 1.0)
    defect = np.abs(m - m.conj().T).max()
    if defect > hermiticity_tol * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian: max|M - M^H| = {defect:.3e} "
            f"(tolerance {hermiticity_tol * scale:.3e})"
        )
    try:
        values, vectors = np.linalg.eigh((m + m.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge: {exc}") from exc
    for lo, hi in _degenerate_blocks(values, degeneracy_tol):
        if hi - lo >= 2 and observables:
            vectors[:, lo:hi] = _canonicalize_block(vectors[:, lo:hi], tuple(observables))
    vectors = _fix_phases(vectors)
    return EigenSolution(values=values, vectors=vectors)


def expectation(op: np.ndarray, vector: np.ndarray) -> float:
    """Real expectation value <v|op|v> of a Hermitian operator."""
    return float(np.real(vector.conj() @ (op @ vector)))


def expectations(op: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Column-wise expectation values of a Hermitian operator."""
    return np.real(np.einsum("ik,ij,jk->k", vectors.conj(), op, vectors))
