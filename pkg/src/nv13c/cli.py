"""Command-line interface.

Subcommands: eigen, sweep, transitions, zefoz, spectrum, lac, fieldcal.
Data goes to --out as CSV (default) or JSON; --plot additionally renders a
matplotlib figure next to the delimited output. Exit codes: 0 success,
2 validation problem (bad flag, unreadable file, schema error), 3 numerical
failure.
"""

import argparse
import sys

import numpy as np

from . import io as nvio
from .fieldcal import field_error, field_error_from_linewidth
from .spectra import synthesize_spectrum
from .spinops import EigensolverError, NonHermitianError, expectations
from .sweep import (
    AmbiguousTrackingError,
    FieldGrid,
    GridError,
    find_lacs,
    manifold_label,
    sweep_eigen,
)
from .system import (
    SpinSystem,
    SystemValidationError,
    bundled_system_path,
    eigensolve,
    load_system,
    operators,
)
from .transitions import DEFAULT_KAPPA_MIN, FitWindowError, enumerate_transitions
from .zefoz import LinewidthModel, scan_dpt

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


def _add_system_flags(p: argparse.ArgumentParser):
    p.add_argument("--system", default=None, metavar="PATH", help="spin-system JSON (default: bundled nv3c.json)")
    p.add_argument("--nuclear-zeeman", action="store_true", help="include the nuclear Zeeman term")


def _add_output_flags(p: argparse.ArgumentParser):
    p.add_argument("--out", metavar="PATH", help="output file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plot", metavar="PATH", help="also render a figure to this file")


def _add_field_flags(p: argparse.ArgumentParser):
    p.add_argument("--field", type=float, metavar="G", help="single field value")
    p.add_argument("--from", dest="b_from", type=float, metavar="G", help="sweep start")
    p.add_argument("--to", dest="b_to", type=float, metavar="G", help="sweep end")
    p.add_argument("--step", type=float, default=0.5, metavar="G", help="sweep step (default 0.5)")


def _add_kappa_flags(p: argparse.ArgumentParser):
    p.add_argument("--kappa-min", type=float, default=DEFAULT_KAPPA_MIN, metavar="X")
    p.add_argument("--tme-squared", action="store_true", help="use the |TME|^2 convention")


def _add_window_flags(p: argparse.ArgumentParser):
    p.add_argument("--fmin", type=float, default=0.0, metavar="MHZ")
    p.add_argument("--fmax", type=float, default=float("inf"), metavar="MHZ")


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--bath-spread", type=float, default=23.3, metavar="G")
    p.add_argument("--floor", type=float, default=0.5, metavar="MHZ")
    p.add_argument("--reference", type=float, default=65.19, metavar="MHZ")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nv13c",
        description="NV-(3)13C spin-system simulator: levels, anti-crossings, "
        "protected transitions and CW-ODMR spectra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="diagonalize at one field")
    _add_system_flags(p)
    _add_field_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="tracked eigenlevel sweep over a field range")
    _add_system_flags(p)
    _add_field_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("transitions", help="score all level pairs at one field")
    _add_system_flags(p)
    _add_field_flags(p)
    _add_kappa_flags(p)
    _add_window_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("zefoz", help="search a field range for protected transitions")
    _add_system_flags(p)
    _add_field_flags(p)
    _add_kappa_flags(p)
    _add_model_flags(p)
    p.add_argument("--observable-only", action="store_true", help="drop records below the kappa threshold at the optimum")
    _add_output_flags(p)

    p = sub.add_parser("spectrum", help="synthesize a CW-ODMR spectrum")
    _add_system_flags(p)
    _add_field_flags(p)
    _add_kappa_flags(p)
    _add_window_flags(p)
    _add_model_flags(p)
    p.add_argument("--records", metavar="PATH", help="reuse a transitions table (csv or json) instead of --field")
    p.add_argument("--points", type=int, default=4001, help="frequency-axis sample count")
    p.add_argument("--peaks", metavar="PATH", help="measured-peak CSV (nu_mhz, fwhm_mhz, amplitude) to assign")
    p.add_argument("--assign-out", metavar="PATH", help="assignment JSON output (requires --peaks)")
    p.add_argument("--assign-window", type=float, default=5.0, metavar="MHZ")
    _add_output_flags(p)

    p = sub.add_parser("lac", help="locate level anti-crossings in a field range")
    _add_system_flags(p)
    _add_field_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("fieldcal", help="ensemble magnetometer field-calibration error")
    p.add_argument("--n-spins", type=float, required=True)
    p.add_argument("--t-meas", type=float, metavar="S", help="measurement time, seconds")
    p.add_argument("--t2-star", type=float, metavar="S", help="dephasing time, seconds")
    p.add_argument("--linewidth", type=float, metavar="MHZ", help="derive both times from this FWHM")
    p.add_argument("--gamma", type=float, default=2.8, metavar="MHZ_PER_G")
    p.add_argument("--out", metavar="PATH", help="optional JSON output")
    return parser


def _load(args) -> SpinSystem:
    path = args.system if args.system else bundled_system_path()
    try:
        system = load_system(path)
    except FileNotFoundError as exc:
        raise CliError(f"--system: cannot read {path}: {exc}") from exc
    if args.nuclear_zeeman:
        system.include_nuclear_zeeman = True
    return system


def _require_field(args) -> float:
    if args.field is None:
        raise CliError("--field is required for this command (not --from/--to)")
    if args.b_from is not None or args.b_to is not None:
        raise CliError("pass exactly one of --field or --from/--to/--step")
    return args.field


def _require_range(args) -> FieldGrid:
    if args.field is not None:
        raise CliError("pass exactly one of --field or --from/--to/--step")
    if args.b_from is None or args.b_to is None:
        raise CliError("--from and --to are required for this command")
    if args.step <= 0:
        raise CliError("--step must be positive")
    return FieldGrid(args.b_from, args.b_to, args.step)


def _model(args) -> LinewidthModel:
    try:
        return LinewidthModel(
            bath_spread_g=args.bath_spread, floor_mhz=args.floor, reference_mhz=args.reference
        )
    except ValueError as exc:
        raise CliError(f"linewidth model: {exc}") from exc


def _emit(args, csv_header, csv_rows, json_payload):
    if args.out:
        if args.format == "csv":
            nvio.write_csv(args.out, csv_header, csv_rows)
        else:
            nvio.write_json(args.out, json_payload)
        print(f"wrote {args.out}")


def _degeneracy_summary(values: np.ndarray, labels, tol: float) -> dict:
    groups: dict = {}
    for m in sorted({str(x) for x in labels}):
        vals = np.sort(values[[str(x) == m for x in labels]])
        if vals.size == 0:
            continue
        sizes, count = [], 1
        for a, b in zip(vals[:-1], vals[1:]):
            if b - a <= tol:
                count += 1
            else:
                sizes.append(count)
                count = 1
        sizes.append(count)
        groups[m] = sizes
    return groups


def cmd_eigen(args) -> int:
    system = _load(args)
    b = _require_field(args)
    sol, sz, kz = eigensolve(system, b)
    labels = [manifold_label(v) for v in sz]
    rows = [(k, sol.values[k], sz[k], kz[k], labels[k]) for k in range(len(sol.values))]
    payload = [dict(zip(nvio.EIGEN_COLUMNS, row)) for row in rows]
    _emit(args, nvio.EIGEN_COLUMNS, rows, payload)
    # summary regions use <Sz^2> so zero-field Kramers doublets with
    # suppressed <Sz> still land with their electron-spin partners
    ops = operators(system)
    sz2 = expectations(ops.sz2, sol.vectors)
    regions = [
        0 if s2 < 0.5 else (1 if s > 0 else -1) for s2, s in zip(sz2, sz)
    ]
    print(f"B = {b:g} G: {len(sol.values)} levels")
    for tol, name in ((1e-6, "1e-6 MHz"), (25.0, "25 MHz")):
        print(f"degeneracy groups ({name} clustering): {_degeneracy_summary(sol.values, regions, tol)}")
    if args.plot:
        raise CliError("--plot applies to range commands; eigen has no curve to draw")
    return EXIT_OK


def cmd_sweep(args) -> int:
    system = _load(args)
    grid = _require_range(args)
    tracked = sweep_eigen(system, grid)
    rows = list(nvio.sweep_rows(tracked))
    payload = [dict(zip(nvio.SWEEP_COLUMNS, row)) for row in rows]
    _emit(args, nvio.SWEEP_COLUMNS, rows, payload)
    print(f"swept {len(tracked.b)} fields x {tracked.n_levels} levels")
    if args.plot:
        from . import plotting

        print(f"figure: {plotting.plot_sweep(tracked, args.plot)}")
    return EXIT_OK


def cmd_transitions(args) -> int:
    system = _load(args)
    b = _require_field(args)
    records = enumerate_transitions(
        system,
        b,
        kappa_min=args.kappa_min,
        fmin_mhz=args.fmin,
        fmax_mhz=args.fmax,
        tme_squared=args.tme_squared,
    )
    rows = [nvio.transition_row(r) for r in records]
    payload = [nvio.transition_dict(r) for r in records]
    _emit(args, nvio.TRANSITION_COLUMNS, rows, payload)
    print(f"B = {b:g} G: {len(records)} transitions with kappa >= {args.kappa_min:g}")
    if args.plot:
        from . import plotting

        print(f"figure: {plotting.plot_transitions(records, args.plot)}")
    return EXIT_OK


def cmd_zefoz(args) -> int:
    system = _load(args)
    grid = _require_range(args)
    model = _model(args)
    tracked = sweep_eigen(system, grid)
    records = scan_dpt(
        tracked,
        kappa_min=args.kappa_min,
        model=model,
        observable_only=args.observable_only,
    )
    rows = [nvio.dpt_row(r) for r in records]
    payload = [nvio.dpt_dict(r) for r in records]
    _emit(args, nvio.DPT_COLUMNS, rows, payload)
    print(f"{len(records)} slope minima in [{grid.b_start:g}, {grid.b_end:g}] G")
    for rec in records[:10]:
        print(
            f"  pair ({rec.level_i},{rec.level_f}) at {rec.b_opt:.2f} G: "
            f"|gamma_eff| = {rec.gamma_eff_khz_per_g:.3f} kHz/G, "
            f"nu = {rec.nu_at_opt_mhz:.2f} MHz, kappa = {rec.kappa_at_opt:.2e}"
        )
    if args.plot:
        from . import plotting

        print(f"figure: {plotting.plot_dpt(records, args.plot)}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    system = _load(args)
    model = _model(args)
    if args.records:
        if args.field is not None:
            raise CliError("pass exactly one of --records or --field")
        try:
            if args.records.endswith(".json"):
                records = nvio.read_transitions_json(args.records)
            else:
                records = nvio.read_transitions_csv(args.records)
        except FileNotFoundError as exc:
            raise CliError(f"--records: {exc}") from exc
        except ValueError as exc:
            raise CliError(f"--records: {exc}") from exc
        b = records[0].b_gauss if records else float("nan")
    else:
        b = _require_field(args)
        records = enumerate_transitions(
            system, b, kappa_min=0.0, tme_squared=args.tme_squared
        )
    if not np.isfinite(args.fmax):
        raise CliError("--fmax is required for spectrum")
    if args.points < 2:
        raise CliError("--points must be at least 2")
    axis = np.linspace(args.fmin, args.fmax, args.points)
    trace = synthesize_spectrum(records, axis, model=model, kappa_min=args.kappa_min, b_gauss=b)
    rows = list(nvio.spectrum_rows(trace))
    payload = {
        "b_gauss": None if np.isnan(trace.b_gauss) else trace.b_gauss,
        "kappa_min": trace.kappa_min,
        "freq_mhz": [float(x) for x in trace.freq_mhz],
        "intensity": [float(y) for y in trace.intensity],
    }
    _emit(args, nvio.SPECTRUM_COLUMNS, rows, payload)
    print(
        f"spectrum over [{args.fmin:g}, {args.fmax:g}] MHz at {args.points} points, "
        f"peak intensity {trace.intensity.max():.3e}"
    )
    if args.peaks:
        from .spectra import assign_peaks

        measured = nvio.read_peaks_csv(args.peaks)
        kept = [r for r in records if r.kappa >= args.kappa_min]
        assignments = assign_peaks(measured, kept, window_mhz=args.assign_window)
        for a in assignments:
            if a.assigned:
                print(
                    f"  peak {a.peak.nu_mhz:.2f} MHz -> pair ({a.level_i},{a.level_f}) "
                    f"at {a.predicted_nu_mhz:.2f} MHz (kappa {a.kappa:.2e})"
                )
            else:
                print(f"  peak {a.peak.nu_mhz:.2f} MHz -> unassigned")
        if args.assign_out:
            nvio.write_json(args.assign_out, [nvio.assignment_dict(a) for a in assignments])
            print(f"wrote {args.assign_out}")
    elif args.assign_out:
        raise CliError("--assign-out requires --peaks")
    if args.plot:
        from . import plotting

        print(f"figure: {plotting.plot_spectrum(trace, args.plot)}")
    return EXIT_OK


def cmd_lac(args) -> int:
    system = _load(args)
    grid = _require_range(args)
    tracked = sweep_eigen(system, grid)
    records = find_lacs(tracked)
    rows = [nvio.lac_row(r) for r in records]
    payload = [dict(zip(nvio.LAC_COLUMNS, row)) for row in rows]
    _emit(args, nvio.LAC_COLUMNS, rows, payload)
    by_tag: dict = {}
    for rec in records:
        by_tag.setdefault(rec.set_tag, []).append(rec)
    print(f"{len(records)} gap minima in [{grid.b_start:g}, {grid.b_end:g}] G")
    for tag in sorted(by_tag):
        bs = [r.b_star for r in by_tag[tag]]
        print(f"  {tag}: {len(bs)} records, B in [{min(bs):.2f}, {max(bs):.2f}] G")
    if args.plot:
        from . import plotting

        print(f"figure: {plotting.plot_lacs(tracked, records, args.plot)}")
    return EXIT_OK


def cmd_fieldcal(args) -> int:
    have_times = args.t_meas is not None and args.t2_star is not None
    if args.linewidth is not None:
        if have_times or args.t_meas is not None or args.t2_star is not None:
            raise CliError("pass either --linewidth or both --t-meas and --t2-star")
        try:
            db = field_error_from_linewidth(args.n_spins, args.linewidth, args.gamma)
        except ValueError as exc:
            raise CliError(f"fieldcal: {exc}") from exc
    elif have_times:
        try:
            db = field_error(args.n_spins, args.t_meas, args.t2_star, args.gamma)
        except ValueError as exc:
            raise CliError(f"fieldcal: {exc}") from exc
    else:
        raise CliError("pass either --linewidth or both --t-meas and --t2-star")
    print(f"delta_B = {db:.6g} G")
    if args.out:
        nvio.write_json(
            args.out,
            {
                "n_spins": args.n_spins,
                "t_meas_s": args.t_meas,
                "t2_star_s": args.t2_star,
                "linewidth_mhz": args.linewidth,
                "gamma_mhz_per_g": args.gamma,
                "delta_b_gauss": db,
            },
        )
        print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "eigen": cmd_eigen,
    "sweep": cmd_sweep,
    "transitions": cmd_transitions,
    "zefoz": cmd_zefoz,
    "spectrum": cmd_spectrum,
    "lac": cmd_lac,
    "fieldcal": cmd_fieldcal,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SystemValidationError, GridError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (
        AmbiguousTrackingError,
        EigensolverError,
        NonHermitianError,
        FitWindowError,
        np.linalg.LinAlgError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
