import numpy as np
import pytest

from nv13c import FieldGrid, bare_nv_system, nv3c_system, sweep_eigen

# Published transition parameters (B in G; nu, dnu in MHz; gamma in kHz/G;
# curvature in kHz/G^2). The published 871 G / 22.68 MHz row prints a
# linewidth and narrowing factor that are mutually inconsistent, which the
# epsilon tests single out.
TABLE1 = [
    (608.0, 22.30, 1.24, 13.62, 0.57, 6.04e-6, 52.52),
    (608.0, 27.25, 0.53, 21.05, 0.56, 7.54e-5, 123.69),
    (608.0, 39.65, 2.80, 97.13, 0.51, 1.24e-4, 23.32),
    (608.0, 42.32, 4.49, 92.98, 0.59, 2.66e-6, 14.51),
    (739.0, 21.89, 7.88, 49.45, 1.48, 1.38e-4, 8.26),
    (739.0, 29.35, 4.26, 87.90, 0.57, 3.11e-5, 15.29),
    (739.0, 34.93, 2.46, 94.65, 0.56, 2.98e-7, 26.54),
    (739.0, 37.93, 8.46, 101.28, 2.05, 3.18e-4, 7.70),
    (739.0, 59.65, 6.63, 170.30, 0.59, 4.94e-6, 9.83),
    (871.0, 22.68, 13.02, 144.63, 3.58, 1.29e-3, 9.14),
    (871.0, 43.15, 16.95, 162.74, 0.57, 2.11e-4, 3.85),
    (871.0, 55.69, 8.68, 168.82, 0.56, 1.50e-3, 7.51),
    (871.0, 67.49, 12.28, 371.51, 2.05, 2.11e-5, 5.31),
]

TABLE1_FIELDS = (608.0, 739.0, 871.0)


def table1_at(b_gauss: float):
    return [row for row in TABLE1 if row[0] == b_gauss]


@pytest.fixture(scope="session")
def nv3c():
    return nv3c_system()


@pytest.fixture(scope="session")
def bare_nv():
    return bare_nv_system()


@pytest.fixture(scope="session")
def tracked_dpt_range(nv3c):
    """550-950 G at 1 G: the protected-transition search window."""
    return sweep_eigen(nv3c, FieldGrid(540.0, 960.0, 1.0))


@pytest.fixture(scope="session")
def tracked_low_field(nv3c):
    """0-100 G at 0.1 G (starts at 0.1 G): the first anti-crossing set."""
    return sweep_eigen(nv3c, FieldGrid(0.0, 100.0, 0.1))


@pytest.fixture(scope="session")
def tracked_high_field(nv3c):
    """700-1200 G at 0.5 G: the second anti-crossing set."""
    return sweep_eigen(nv3c, FieldGrid(700.0, 1200.0, 0.5))


@pytest.fixture(scope="session")
def tracked_table_fields(nv3c):
    """290-881 G at 0.5 G, covering every published spectrum field."""
    return sweep_eigen(nv3c, FieldGrid(290.0, 881.0, 0.5))


def degeneracy_groups(values: np.ndarray, tol: float) -> list[int]:
    values = np.sort(np.asarray(values))
    sizes, count = [], 1
    for a, b in zip(values[:-1], values[1:]):
        if b - a <= tol:
            count += 1
        else:
            sizes.append(count)
            count = 1
    sizes.append(count)
    return sizes
