import json

import numpy as np
import pytest

from conftest import degeneracy_groups
from nv13c.spinops import embed, expectations, spin_matrices
from nv13c.system import (
    NV3C_HYPERFINE_MHZ,
    SpinSystem,
    SystemValidationError,
    bundled_system_path,
    build_hamiltonian,
    eigensolve,
    hyperfine_term,
    load_system,
    nv3c_system,
    operators,
    parse_system,
)

D = 2870.0
GAMMA = 2.8


class TestParseSystem:
    def test_empty_document_gives_bare_nv_defaults(self):
        system = parse_system("{}")
        assert system.electron.spin == 1.0
        assert system.electron.gamma_e_mhz_per_g == 2.8
        assert system.electron.zfs_d_mhz == 2870.0
        assert system.nuclei == []
        assert system.include_nuclear_zeeman is False

    def test_bundled_file_is_the_three_nucleus_system(self):
        system = load_system(bundled_system_path())
        assert len(system.nuclei) == 3
        azimuths = [n.azimuth_rad for n in system.nuclei]
        assert np.allclose(azimuths, [0.0, 2 * np.pi / 3, 4 * np.pi / 3])
        for nuc in system.nuclei:
            assert np.allclose(nuc.hyperfine_mhz, NV3C_HYPERFINE_MHZ)
            assert nuc.gamma_n_khz_per_g == 1.0705

    def test_rejects_asymmetric_tensor_with_path(self):
        doc = {
            "nuclei": [
                {"hyperfine_mhz": [166.9, 0, -90, 0, 122.9, 0, -89.0, 0, 90]}
            ]
        }
        with pytest.raises(SystemValidationError, match=r"nuclei\[0\].hyperfine_mhz"):
            parse_system(json.dumps(doc))

    def test_rejects_negative_spin(self):
        with pytest.raises(SystemValidationError, match=r"electron.spin"):
            parse_system(json.dumps({"electron": {"spin": -1}}))

    def test_rejects_wrong_type(self):
        with pytest.raises(SystemValidationError, match=r"zfs_d_mhz"):
            parse_system(json.dumps({"electron": {"zfs_d_mhz": "big"}}))

    def test_rejects_missing_tensor(self):
        with pytest.raises(SystemValidationError, match=r"nuclei\[0\].hyperfine_mhz"):
            parse_system(json.dumps({"nuclei": [{"spin": 0.5}]}))

    def test_rejects_unknown_keys(self):
        with pytest.raises(SystemValidationError, match="unknown keys"):
            parse_system(json.dumps({"stray": 1}))

    def test_rejects_bad_json(self):
        with pytest.raises(SystemValidationError, match="not valid JSON"):
            parse_system("{nope")


class TestHyperfineTerm:
    DIMS = [3, 2]

    def _ops(self):
        e, n = spin_matrices(1), spin_matrices(0.5)
        s_ops = tuple(embed(o, 0, self.DIMS) for o in (e.sx, e.sy, e.sz))
        i_ops = tuple(embed(o, 1, self.DIMS) for o in (n.sx, n.sy, n.sz))
        return s_ops, i_ops

    def test_zero_tensor(self):
        s_ops, i_ops = self._ops()
        assert np.abs(hyperfine_term(np.zeros((3, 3)), s_ops, i_ops)).max() == 0

    def test_isotropic_coupling_eigenvalues(self):
        # a * S.I on S=1 x I=1/2 splits into a/2 (J=3/2, 4 states) and -a (J=1/2)
        a = 37.0
        s_ops, i_ops = self._ops()
        h = hyperfine_term(a * np.eye(3), s_ops, i_ops)
        w = np.linalg.eigvalsh(h)
        assert np.allclose(np.sort(w), [-a, -a, a / 2, a / 2, a / 2, a / 2])

    def test_matches_four_term_expansion_for_nv_tensor(self):
        s_ops, i_ops = self._ops()
        sx, sy, sz = s_ops
        ix, iy, iz = i_ops
        explicit = (
            166.9 * sx @ ix
            + 122.9 * sy @ iy
            + 90.0 * sz @ iz
            + -90.0 * (sz @ ix + sx @ iz)
        )
        assert np.abs(hyperfine_term(NV3C_HYPERFINE_MHZ, s_ops, i_ops) - explicit).max() < 1e-13

    def test_hermitian_output(self):
        s_ops, i_ops = self._ops()
        h = hyperfine_term(NV3C_HYPERFINE_MHZ, s_ops, i_ops)
        assert np.abs(h - h.conj().T).max() < 1e-12


class TestBuildHamiltonian:
    def test_bare_nv_zero_field(self, bare_nv):
        w = np.linalg.eigvalsh(build_hamiltonian(bare_nv, 0.0))
        assert np.allclose(np.sort(w), [-2 * D / 3, D / 3, D / 3])
        assert abs((w[2] - w[0]) - 2870.0) < 1e-9

    def test_bare_nv_linear_zeeman(self, bare_nv):
        sol, sz, _ = eigensolve(bare_nv, 100.0)
        energy = {round(s): e for e, s in zip(sol.values, sz)}
        nu_minus = energy[-1] - energy[0]
        nu_plus = energy[1] - energy[0]
        assert abs(nu_minus - (2870.0 - 280.0)) < 1e-9
        assert abs(nu_plus - (2870.0 + 280.0)) < 1e-9

    def test_single_c13_satellites(self):
        system = SpinSystem(nuclei=nv3c_system().nuclei[:1])
        sol, sz, _ = eigensolve(system, 0.0)
        sz2 = expectations(operators(system).sz2, sol.vectors)
        low = sol.values[sz2 < 0.5]
        high = sol.values[sz2 >= 0.5]
        nus = sorted({round(float(b - a), 3) for a in low for b in high})
        assert any(abs(nu - (D - 56.9)) <= 1.0 for nu in nus), nus
        assert any(abs(nu - (D + 70.7)) <= 1.0 for nu in nus), nus

    def test_hermitian_over_random_fields(self, nv3c):
        rng = np.random.default_rng(17)
        for b in rng.uniform(-2000, 2000, size=12):
            h = build_hamiltonian(nv3c, float(b))
            assert np.abs(h - h.conj().T).max() < 1e-12 * max(1.0, np.abs(h).max())

    def test_field_dependence_is_linear_zeeman(self, nv3c):
        ops = operators(nv3c)
        h1 = build_hamiltonian(nv3c, 200.0)
        h2 = build_hamiltonian(nv3c, 450.0)
        assert np.abs((h2 - h1) - 250.0 * GAMMA * ops.sz).max() < 1e-10

    def test_nuclear_zeeman_flag_adds_term(self):
        on = nv3c_system(include_nuclear_zeeman=True)
        off = nv3c_system()
        ops_on = operators(on)
        h_on = build_hamiltonian(on, 1000.0)
        h_off = build_hamiltonian(off, 1000.0)
        expected = -1e-3 * 1.0705 * 1000.0 * ops_on.kz
        assert np.abs((h_on - h_off) - expected).max() < 1e-10

    def test_eigenvalues_invariant_under_cyclic_nucleus_relabeling(self, nv3c):
        rolled = SpinSystem(
            electron=nv3c.electron,
            nuclei=[nv3c.nuclei[1], nv3c.nuclei[2], nv3c.nuclei[0]],
        )
        for b in (0.0, 350.0):
            w1 = np.linalg.eigvalsh(build_hamiltonian(nv3c, b))
            w2 = np.linalg.eigvalsh(build_hamiltonian(rolled, b))
            assert np.abs(w1 - w2).max() < 1e-8

    def test_rejects_non_finite_field(self, nv3c):
        with pytest.raises(SystemValidationError):
            build_hamiltonian(nv3c, float("nan"))


class TestZeroFieldStructure:
    def test_ms0_manifold_four_doublets(self, nv3c):
        sol, sz, _ = eigensolve(nv3c, 0.0)
        sz2 = expectations(operators(nv3c).sz2, sol.vectors)
        ms0 = np.sort(sol.values[sz2 < 0.5])
        assert len(ms0) == 8
        assert degeneracy_groups(ms0, 1e-6) == [2, 2, 2, 2]

    def test_pm1_region_quartet_structure(self, nv3c):
        sol, sz, _ = eigensolve(nv3c, 0.0)
        sz2 = expectations(operators(nv3c).sz2, sol.vectors)
        pm1 = np.sort(sol.values[sz2 >= 0.5])
        assert len(pm1) == 16
        # every level is a Kramers doublet, and each manifold's half of the
        # quartet clusters as 1:3:3:1 on the first-order hyperfine scale
        assert degeneracy_groups(pm1, 1e-6) == [2] * 8
        assert degeneracy_groups(pm1, 25.0) == [2, 6, 6, 2]
        for sign in (1, -1):
            one_manifold = np.sort(sol.values[(sz2 >= 0.5) & (np.sign(sz) == sign)])
            assert len(one_manifold) == 8
            assert degeneracy_groups(one_manifold, 25.0) == [1, 3, 3, 1]

    def test_without_hyperfine_three_eightfold_levels(self):
        system = nv3c_system()
        for nuc in system.nuclei:
            nuc.hyperfine_mhz = np.zeros((3, 3))
        w = np.linalg.eigvalsh(build_hamiltonian(system, 0.0))
        assert degeneracy_groups(w, 1e-6) == [8, 16] or degeneracy_groups(w, 1e-6) == [8, 8, 8]
        # m_S = +-1 coincide at zero field; at finite field the split shows
        w = np.linalg.eigvalsh(build_hamiltonian(system, 50.0))
        assert degeneracy_groups(w, 1e-6) == [8, 8, 8]
