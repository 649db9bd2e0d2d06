import numpy as np

from nv13c.io import (
    TRANSITION_COLUMNS,
    read_transitions_csv,
    read_transitions_json,
    transition_dict,
    transition_row,
    write_csv,
    write_json,
)
from nv13c.transitions import enumerate_transitions


def test_transition_csv_round_trip_lossless(nv3c, tmp_path):
    # 1000 G sits inside the second anti-crossing set, so the table carries
    # mixed manifolds and degenerate pairs without a first-order slope
    records = enumerate_transitions(nv3c, 1000.0)
    assert any(r.manifold_i == "mixed" or r.manifold_f == "mixed" for r in records)
    path = tmp_path / "t.csv"
    write_csv(path, TRANSITION_COLUMNS, [transition_row(r) for r in records])
    back = read_transitions_csv(str(path))
    assert back == records


def test_transition_json_round_trip_lossless(nv3c, tmp_path):
    records = enumerate_transitions(nv3c, 608.0, kappa_min=1e-6)
    path = tmp_path / "t.json"
    write_json(path, [transition_dict(r) for r in records])
    back = read_transitions_json(str(path))
    assert back == records


def test_float_cells_survive_repr(tmp_path):
    path = tmp_path / "x.csv"
    value = 0.1 + 0.2  # not exactly 0.3
    write_csv(path, ["a"], [(np.float64(value),)])
    text = path.read_text().splitlines()[1]
    assert float(text) == value


def test_plotting_functions_render(nv3c, tmp_path, tracked_dpt_range):
    from nv13c.plotting import plot_dpt, plot_lacs, plot_spectrum, plot_sweep, plot_transitions
    from nv13c.spectra import synthesize_spectrum
    from nv13c.sweep import find_lacs
    from nv13c.zefoz import scan_dpt

    records = enumerate_transitions(nv3c, 608.0, kappa_min=1e-6)
    trace = synthesize_spectrum(records, np.linspace(5.0, 80.0, 501))
    dpt = scan_dpt(tracked_dpt_range, kappa_min=1e-6, b_range=(550.0, 650.0))
    lacs = find_lacs(tracked_dpt_range)
    outputs = [
        plot_sweep(tracked_dpt_range, str(tmp_path / "sweep.png")),
        plot_spectrum(trace, str(tmp_path / "spec.png")),
        plot_transitions(records, str(tmp_path / "trans.png")),
        plot_dpt(dpt, str(tmp_path / "dpt.png")),
        plot_lacs(tracked_dpt_range, lacs, str(tmp_path / "lacs.png")),
    ]
    for path in outputs:
        assert (tmp_path / path.split("/")[-1]).stat().st_size > 0
