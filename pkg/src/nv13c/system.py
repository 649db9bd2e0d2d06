"""Declarative spin-system description and ground-state Hamiltonian assembly.

Units are the natural experimental ones everywhere: energies in MHz, fields
in Gauss, electron gyromagnetic ratio in MHz/G, nuclear ones in kHz/G. The
default system is the NV- center (S = 1, D = 2870 MHz, gamma = 2.8 MHz/G)
coupled to three first-shell 13C nuclei whose identical hyperfine tensor is
placed at azimuths 0, 2pi/3 and 4pi/3 about the defect axis.
"""

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .spinops import (
    EigenSolution,
    embed,
    expectations,
    hermitian_eig,
    rotate_tensor,
    spin_matrices,
)

GAMMA_E_DEFAULT_MHZ_PER_G = 2.8
ZFS_D_DEFAULT_MHZ = 2870.0
GAMMA_C13_KHZ_PER_G = 1.0705
TENSOR_SYMMETRY_TOL = 1e-9


class SystemValidationError(ValueError):
    """A system description failed validation; the message names the field."""


@dataclass
class ElectronParams:
    spin: float = 1.0
    gamma_e_mhz_per_g: float = GAMMA_E_DEFAULT_MHZ_PER_G
    zfs_d_mhz: float = ZFS_D_DEFAULT_MHZ


@dataclass
class NucleusParams:
    spin: float = 0.5
    gamma_n_khz_per_g: float = GAMMA_C13_KHZ_PER_G
    hyperfine_mhz: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    azimuth_rad: float = 0.0

    def rotated_tensor(self) -> np.ndarray:
        """Hyperfine tensor carried to this nucleus' azimuth."""
        return rotate_tensor(self.hyperfine_mhz, self.azimuth_rad)


@dataclass
class SpinSystem:
    electron: ElectronParams = field(default_factory=ElectronParams)
    nuclei: list[NucleusParams] = field(default_factory=list)
    include_nuclear_zeeman: bool = False

    @property
    def dims(self) -> list[int]:
        return [int(round(2 * self.electron.spin + 1))] + [
            int(round(2 * n.spin + 1)) for n in self.nuclei
        ]

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))


@dataclass
class SystemOperators:
    """Embedded operators and precomputed Hamiltonian parts for one system.

    ``h_static`` holds every field-independent term; ``h_zeeman`` is the
    coefficient of B, so H(B) = h_static + B * h_zeeman exactly.
    """

    system: SpinSystem
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    sz2: np.ndarray
    s2: np.ndarray
    nuclear: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    kx: np.ndarray
    ky: np.ndarray
    kz: np.ndarray
    h_static: np.ndarray
    h_zeeman: np.ndarray


# first-shell NV-13C hyperfine tensor, MHz (nucleus 1 in the xz plane)
NV3C_HYPERFINE_MHZ = np.array(
    [
        [166.9, 0.0, -90.0],
        [0.0, 122.9, 0.0],
        [-90.0, 0.0, 90.0],
    ]
)


def nv3c_system(include_nuclear_zeeman: bool = False) -> SpinSystem:
    """The NV-(3)13C system with the published hyperfine tensor."""
    nuclei = [
        NucleusParams(
            spin=0.5,
            gamma_n_khz_per_g=GAMMA_C13_KHZ_PER_G,
            hyperfine_mhz=NV3C_HYPERFINE_MHZ.copy(),
            azimuth_rad=n * 2.0 * np.pi / 3.0,
        )
        for n in range(3)
    ]
    return SpinSystem(
        electron=ElectronParams(),
        nuclei=nuclei,
        include_nuclear_zeeman=include_nuclear_zeeman,
    )


def bare_nv_system() -> SpinSystem:
    """NV- electron spin only, no nuclei."""
    return SpinSystem(electron=ElectronParams(), nuclei=[])


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise SystemValidationError(f"{path}: {message}")


def _field(obj: dict, path: str, key: str, kind, default=None, required=False):
    if key not in obj:
        if required:
            raise SystemValidationError(f"{path}.{key}: missing required field")
        return default
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SystemValidationError(f"{path}.{key}: expected a number, got {value!r}")
        return float(value)
    if kind is bool:
        if not isinstance(value, bool):
            raise SystemValidationError(f"{path}.{key}: expected a boolean, got {value!r}")
        return value
    raise AssertionError(kind)


_ELECTRON_KEYS = {"spin", "gamma_e_mhz_per_g", "zfs_d_mhz"}
_NUCLEUS_KEYS = {"spin", "gamma_n_khz_per_g", "hyperfine_mhz", "azimuth_rad"}
_TOP_KEYS = {"electron", "nuclei", "include_nuclear_zeeman"}


def parse_system(text: str) -> SpinSystem:
    """Parse and validate a spin-system JSON document.

    Unspecified optional fields take the NV-(3)13C defaults. Errors name the
    offending field with a JSON-style path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemValidationError(f"$: not valid JSON ({exc})") from exc
    _require(isinstance(doc, dict), "$", "top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, "$", f"unknown keys {sorted(unknown)}")

    e_obj = doc.get("electron", {})
    _require(isinstance(e_obj, dict), "$.electron", "must be an object")
    unknown = set(e_obj) - _ELECTRON_KEYS
    _require(not unknown, "$.electron", f"unknown keys {sorted(unknown)}")
    electron = ElectronParams(
        spin=_field(e_obj, "$.electron", "spin", float, default=1.0),
        gamma_e_mhz_per_g=_field(
            e_obj, "$.electron", "gamma_e_mhz_per_g", float, default=GAMMA_E_DEFAULT_MHZ_PER_G
        ),
        zfs_d_mhz=_field(e_obj, "$.electron", "zfs_d_mhz", float, default=ZFS_D_DEFAULT_MHZ),
    )
    _require(electron.spin >= 0, "$.electron.spin", "spin must be non-negative")
    _require(
        abs(2 * electron.spin - round(2 * electron.spin)) < 1e-12,
        "$.electron.spin",
        "spin must be a half-integer",
    )

    nuclei = []
    raw_nuclei = doc.get("nuclei", [])
    _require(isinstance(raw_nuclei, list), "$.nuclei", "must be an array")
    for k, n_obj in enumerate(raw_nuclei):
        path = f"$.nuclei[{k}]"
        _require(isinstance(n_obj, dict), path, "must be an object")
        unknown = set(n_obj) - _NUCLEUS_KEYS
        _require(not unknown, path, f"unknown keys {sorted(unknown)}")
        spin = _field(n_obj, path, "spin", float, default=0.5)
        _require(spin >= 0, f"{path}.spin", "spin must be non-negative")
        _require(
            abs(2 * spin - round(2 * spin)) < 1e-12, f"{path}.spin", "spin must be a half-integer"
        )
        raw_a = n_obj.get("hyperfine_mhz")
        _require(raw_a is not None, f"{path}.hyperfine_mhz", "missing required field")
        _require(
            isinstance(raw_a, list)
            and len(raw_a) == 9
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw_a),
            f"{path}.hyperfine_mhz",
            "expected 9 numbers (row-major 3x3)",
        )
        tensor = np.array(raw_a, dtype=float).reshape(3, 3)
        _require(
            np.abs(tensor - tensor.T).max() <= TENSOR_SYMMETRY_TOL,
            f"{path}.hyperfine_mhz",
            "tensor must be symmetric",
        )
        azimuth = _field(n_obj, path, "azimuth_rad", float, default=0.0)
        _require(0.0 <= azimuth < 2 * np.pi + 1e-12, f"{path}.azimuth_rad", "must be in [0, 2pi)")
        nuclei.append(
            NucleusParams(
                spin=spin,
                gamma_n_khz_per_g=_field(
                    n_obj, path, "gamma_n_khz_per_g", float, default=GAMMA_C13_KHZ_PER_G
                ),
                hyperfine_mhz=tensor,
                azimuth_rad=azimuth,
            )
        )

    return SpinSystem(
        electron=electron,
        nuclei=nuclei,
        include_nuclear_zeeman=_field(
            doc, "$", "include_nuclear_zeeman", bool, default=False
        ),
    )


def load_system(path) -> SpinSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_system(fh.read())


def bundled_system_path() -> str:
    """Filesystem path of the packaged nv3c.json."""
    return str(resources.files("nv13c").joinpath("data/nv3c.json"))


def hyperfine_term(
    tensor: np.ndarray,
    s_ops: tuple[np.ndarray, np.ndarray, np.ndarray],
    i_ops: tuple[np.ndarray, np.ndarray, np.ndarray],
) -> np.ndarray:
    """Full bilinear hyperfine coupling sum_ab A_ab S_a I_b.

    With only xx, yy, zz and xz entries populated this reduces exactly to
    A_xx Sx Ix + A_yy Sy Iy + A_zz Sz Iz + A_xz (Sz Ix + Sx Iz).
    """
    tensor = np.asarray(tensor, dtype=float)
    out = np.zeros_like(s_ops[0])
    for a in range(3):
        for b in range(3):
            if tensor[a, b] != 0.0:
                out = out + tensor[a, b] * (s_ops[a] @ i_ops[b])
    return out


def build_operators(system: SpinSystem) -> SystemOperators:
    """Embed all operators once and precompute the Hamiltonian parts."""
    dims = system.dims
    e = spin_matrices(system.electron.spin)
    sx = embed(e.sx, 0, dims)
    sy = embed(e.sy, 0, dims)
    sz = embed(e.sz, 0, dims)
    s2 = embed(e.s2, 0, dims)
    sz2 = sz @ sz

    nuclear = []
    for k, nuc in enumerate(system.nuclei):
        i = spin_matrices(nuc.spin)
        nuclear.append(
            (embed(i.sx, k + 1, dims), embed(i.sy, k + 1, dims), embed(i.sz, k + 1, dims))
        )
    dim = int(np.prod(dims))
    kx = sum((n[0] for n in nuclear), np.zeros((dim, dim), dtype=complex))
    ky = sum((n[1] for n in nuclear), np.zeros((dim, dim), dtype=complex))
    kz = sum((n[2] for n in nuclear), np.zeros((dim, dim), dtype=complex))

    h_static = system.electron.zfs_d_mhz * (sz2 - s2 / 3.0)
    for nuc, i_ops in zip(system.nuclei, nuclear):
        h_static = h_static + hyperfine_term(nuc.rotated_tensor(), (sx, sy, sz), i_ops)

    h_zeeman = system.electron.gamma_e_mhz_per_g * sz
    if system.include_nuclear_zeeman:
        for nuc, i_ops in zip(system.nuclei, nuclear):
            h_zeeman = h_zeeman - 1e-3 * nuc.gamma_n_khz_per_g * i_ops[2]

    return SystemOperators(
        system=system,
        sx=sx,
        sy=sy,
        sz=sz,
        sz2=sz2,
        s2=s2,
        nuclear=nuclear,
        kx=kx,
        ky=ky,
        kz=kz,
        h_static=h_static,
        h_zeeman=h_zeeman,
    )


def operators(system: SpinSystem) -> SystemOperators:
    """Per-instance cache around build_operators.

    Systems are treated as immutable once they have been used; mutate a
    fresh instance instead of a cached one.
    """
    ops = getattr(system, "_ops", None)
    if ops is None:
        ops = build_operators(system)
        system._ops = ops
    return ops


def build_hamiltonian(system: SpinSystem, b_gauss: float) -> np.ndarray:
    """Ground-state Hamiltonian in MHz at an axial field of ``b_gauss``."""
    if not np.isfinite(b_gauss):
        raise SystemValidationError("$.field: field must be finite")
    ops = operators(system)
    return ops.h_static + float(b_gauss) * ops.h_zeeman


def eigensolve(system: SpinSystem, b_gauss: float) -> tuple[EigenSolution, np.ndarray, np.ndarray]:
    """Diagonalize at one field; returns (solution, <Sz> array, <Kz> array).

    Degenerate clusters are canonicalized on <Sz> then <Kz> (descending), so
    zero-field output is reproducible.
    """
    ops = operators(system)
    sol = hermitian_eig(build_hamiltonian(system, b_gauss), observables=(ops.sz, ops.kz))
    sz = expectations(ops.sz, sol.vectors)
    kz = expectations(ops.kz, sol.vectors)
    return sol, sz, kz
