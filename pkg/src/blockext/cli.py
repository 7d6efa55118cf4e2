"""Command-line front end.

Each subcommand writes one JSON report and one plot-ready CSV per cell into
``--out`` (``<cell_id>.<command>.json`` and ``.csv``). Results depend only on
the inputs and ``--seed``; ``--workers`` changes speed, never output.

Examples::

    blockext fit --input cell.csv --extreme warm --method pwm
    blockext return-levels --params -41.9,7.2,-0.37 --orientation min --periods 20,50,100
    blockext change --a stateA.json --b stateB.json --bootstrap 1000 --seed 7
    blockext simulate --years 1000 --delta-mean 3 --winter-sd-ratio 0.5 --out data
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import reports
from .blocks import Variable, annual_extremes, multi_year_extremes
from .changes import DEFAULT_PERIODS, change_report
from .dataio import CellRecord, IngestError, atomic_write_text, load_cells, write_daily_csv, write_manifest
from .fit import FitError, Method, fit
from .gevcore import GevDomainError, GevParams, Orientation
from .qq import qq_pairs
from .sensitivity import DIAGNOSTIC_BLOCKS, DIAGNOSTIC_REPLICATES, block_return_level, block_size_diagnostic, segment_experiment
from .synth import SyntheticSpec, generate_daily, two_state_scenario
from .uncertainty import BootstrapConfig, bootstrap_fit

__all__ = ["build_parser", "main", "run_command"]

EXTREMES = {"warm": Orientation.MAXIMA, "cold": Orientation.MINIMA}
DEFAULT_VARIABLE = {Orientation.MAXIMA: Variable.TMAX, Orientation.MINIMA: Variable.TMIN}


class CommandError(Exception):
    """User-facing failure; reported on stderr with exit status 1."""


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: current)")
    p.add_argument("--seed", type=int, default=0, help="seed for all resampling (default: 0)")
    p.add_argument("--workers", type=_positive_int, default=1, help="worker processes (does not change results)")


def _add_extreme(p: argparse.ArgumentParser) -> None:
    p.add_argument("--extreme", choices=sorted(EXTREMES), default="warm", help="warm: annual maxima, cold: July-June minima")


def _add_method(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=[m.value for m in Method], default="ml")


def _add_bootstrap(p: argparse.ArgumentParser, default: int) -> None:
    p.add_argument("--bootstrap", type=int, default=default, metavar="N", help=f"bootstrap replicates (default: {default})")
    p.add_argument("--block-boot-b", type=_positive_int, default=1, metavar="B", help="bootstrap block length in years")


def _add_input(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--input", type=Path, required=required, help="daily CSV file or JSON manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockext", description="GEV analysis of annual temperature extremes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a GEV to each cell's annual extremes")
    _add_input(p)
    _add_extreme(p)
    _add_method(p)
    _add_bootstrap(p, 0)
    _add_common(p)

    p = sub.add_parser("return-levels", help="return-level curve from data or given parameters")
    _add_input(p, required=False)
    p.add_argument("--params", type=_float_list, help="mu,sigma,xi instead of fitting --input")
    p.add_argument("--orientation", choices=["max", "min"], help="orientation of --params")
    p.add_argument("--periods", type=_float_list, default=list(DEFAULT_PERIODS), help="return periods in years")
    p.add_argument("--block-length", type=_positive_int, default=1, help="fit b-year blocks (p = b / r)")
    _add_extreme(p)
    _add_method(p)
    _add_bootstrap(p, 0)
    _add_common(p)

    p = sub.add_parser("change", help="compare two climate states cell by cell")
    p.add_argument("--a", type=Path, required=True, help="state A daily CSV or manifest")
    p.add_argument("--b", type=Path, required=True, help="state B daily CSV or manifest")
    p.add_argument("--periods", type=_float_list, default=list(DEFAULT_PERIODS))
    _add_extreme(p)
    _add_method(p)
    _add_bootstrap(p, 1000)
    _add_common(p)

    p = sub.add_parser("qq", help="empirical versus fitted quantiles")
    _add_input(p)
    _add_extreme(p)
    _add_method(p)
    _add_common(p)

    p = sub.add_parser("block-diagnostic", help="shape consistency across 1- to 10-year blocks")
    _add_input(p)
    _add_extreme(p)
    p.add_argument("--blocks", type=_int_list, default=list(DIAGNOSTIC_BLOCKS), help="block lengths in years")
    p.add_argument("--alpha", type=float, default=0.05)
    _add_bootstrap(p, DIAGNOSTIC_REPLICATES)
    _add_common(p)

    p = sub.add_parser("segment-experiment", help="sampling error of changes from short segments")
    p.add_argument("--a", type=Path, required=True)
    p.add_argument("--b", type=Path, required=True)
    p.add_argument("--L", dest="segment_length", type=_positive_int, default=20, help="segment length in years")
    p.add_argument("--periods", type=_float_list, default=[20.0, 50.0, 100.0])
    _add_extreme(p)
    _add_method(p)
    _add_common(p)

    p = sub.add_parser("simulate", help="write synthetic daily series and manifests")
    defaults = SyntheticSpec()
    p.add_argument("--years", type=_positive_int, default=defaults.n_years)
    p.add_argument("--amplitude", type=float, default=defaults.annual_cycle_amplitude)
    p.add_argument("--mean", type=float, default=defaults.annual_cycle_mean)
    p.add_argument("--phi", type=float, default=defaults.ar1_phi)
    p.add_argument("--noise-sd", type=float, default=defaults.noise_sd)
    p.add_argument("--winter-sd-scale", type=float, default=defaults.winter_sd_scale)
    p.add_argument("--variable", choices=[v.value for v in Variable], default=defaults.variable.value)
    p.add_argument("--cell-id", default="synthetic")
    p.add_argument("--delta-mean", type=float, help="also write a state B with this mean shift")
    p.add_argument("--winter-sd-ratio", type=float, default=1.0, help="state B DJF noise multiplier")
    _add_common(p)
    return parser


def _config(args, n_replicates: int | None = None) -> BootstrapConfig:
    return BootstrapConfig(
        n_replicates=args.bootstrap if n_replicates is None else n_replicates,
        block_length=args.block_boot_b,
        seed=args.seed,
        workers=args.workers,
    )


def _emit(out: Path, cell_id: str, command: str, document: dict, header: list[str], rows) -> None:
    stem = out / f"{cell_id}.{command}"
    atomic_write_text(stem.with_name(stem.name + ".json"), reports.dumps(document))
    atomic_write_text(stem.with_name(stem.name + ".csv"), reports.csv_text(header, rows))


def _cells(path: Path, orientation: Orientation) -> list[CellRecord]:
    return load_cells(path, DEFAULT_VARIABLE[orientation])


def _cmd_fit(args) -> None:
    orientation = EXTREMES[args.extreme]
    for cell in _cells(args.input, orientation):
        extremes = annual_extremes(cell.load(), orientation)
        result = fit(extremes, args.method)
        boot = None
        if args.bootstrap > 0:
            boot = bootstrap_fit(extremes, _config(args), args.method, point=result)
        header, rows = reports.fit_rows(result, boot)
        _emit(args.out, cell.cell_id, "fit", reports.fit_document(cell, result, boot), header, rows)


def _cmd_return_levels(args) -> None:
    periods = np.asarray(args.periods, dtype=float)
    if args.params is not None:
        if args.input is not None:
            raise CommandError("give either --params or --input, not both")
        if len(args.params) != 3:
            raise CommandError("--params needs three values: mu,sigma,xi")
        if args.orientation is None:
            raise CommandError("--params needs --orientation max|min")
        params = GevParams(*args.params, args.orientation)
        levels = np.atleast_1d(block_return_level(_ParamsFit(params, args.block_length), periods))
        document = reports.return_levels_document("params", params, periods, levels, args.block_length)
        _emit(args.out, "params", "return-levels", document, *reports.return_levels_rows(document))
        return
    if args.input is None:
        raise CommandError("give --input or --params")
    orientation = EXTREMES[args.extreme]
    for cell in _cells(args.input, orientation):
        extremes = annual_extremes(cell.load(), orientation)
        if args.block_length > 1:
            extremes = multi_year_extremes(extremes, args.block_length)
        result = fit(extremes, args.method)
        levels = np.atleast_1d(block_return_level(result, periods))
        lower = upper = config = None
        if args.bootstrap > 0:
            config = _config(args)
            boot = bootstrap_fit(extremes, config, args.method, point=result)
            tail = (1.0 - config.level) / 2.0
            reps = boot.return_levels(periods)
            reps = reps[np.all(np.isfinite(reps), axis=1)]
            lower, upper = np.quantile(reps, [tail, 1.0 - tail], axis=0)
        document = reports.return_levels_document(
            cell.cell_id, result.params, periods, levels, args.block_length, Method(args.method), lower, upper, config
        )
        _emit(args.out, cell.cell_id, "return-levels", document, *reports.return_levels_rows(document))


class _ParamsFit:
    """Minimal stand-in for a fit result when parameters are given directly."""

    def __init__(self, params: GevParams, block_length: int) -> None:
        self.params = params
        self.block_length = block_length


def _paired_cells(args, orientation: Orientation) -> list[tuple[CellRecord, CellRecord]]:
    cells_a = _cells(args.a, orientation)
    cells_b = {c.cell_id: c for c in _cells(args.b, orientation)}
    if len(cells_a) == 1 and len(cells_b) == 1:
        return [(cells_a[0], next(iter(cells_b.values())))]
    missing = [c.cell_id for c in cells_a if c.cell_id not in cells_b]
    if missing or len(cells_a) != len(cells_b):
        raise CommandError(f"manifests do not list the same cells (unmatched: {', '.join(missing) or 'in B'})")
    return [(c, cells_b[c.cell_id]) for c in cells_a]


def _cmd_change(args) -> None:
    orientation = EXTREMES[args.extreme]
    config = _config(args)
    if config.n_replicates < 2:
        raise CommandError("change needs --bootstrap of at least 2")
    for cell_a, cell_b in _paired_cells(args, orientation):
        report = change_report(
            cell_a.load(), cell_b.load(), orientation, config, args.method, args.periods, cell_a.cell_id
        )
        document = reports.change_document(report, Method(args.method), config)
        _emit(args.out, cell_a.cell_id, "change", document, *reports.change_rows(document))


def _cmd_qq(args) -> None:
    orientation = EXTREMES[args.extreme]
    for cell in _cells(args.input, orientation):
        extremes = annual_extremes(cell.load(), orientation)
        result = fit(extremes, args.method)
        document = reports.qq_document(cell.cell_id, result, qq_pairs(extremes, result))
        _emit(args.out, cell.cell_id, "qq", document, *reports.qq_rows(document))


def _cmd_block_diagnostic(args) -> None:
    orientation = EXTREMES[args.extreme]
    config = _config(args)
    for cell in _cells(args.input, orientation):
        extremes = annual_extremes(cell.load(), orientation)
        diag = block_size_diagnostic(extremes, config, args.blocks, args.alpha, cell.cell_id)
        document = reports.block_diagnostic_document(diag, orientation, config)
        _emit(args.out, cell.cell_id, "block-diagnostic", document, *reports.block_diagnostic_rows(document))


def _cmd_segment_experiment(args) -> None:
    orientation = EXTREMES[args.extreme]
    for cell_a, cell_b in _paired_cells(args, orientation):
        exp = segment_experiment(
            cell_a.load(), cell_b.load(), args.segment_length, args.periods, args.method, orientation, args.workers
        )
        header, rows = reports.segment_rows(exp)
        _emit(args.out, cell_a.cell_id, "segment-experiment", reports.segment_document(exp, cell_a.cell_id), header, rows)


def _cmd_simulate(args) -> None:
    try:
        spec = SyntheticSpec(
            n_years=args.years,
            annual_cycle_amplitude=args.amplitude,
            annual_cycle_mean=args.mean,
            ar1_phi=args.phi,
            noise_sd=args.noise_sd,
            winter_sd_scale=args.winter_sd_scale,
            seed=args.seed,
            variable=args.variable,
            cell_id=args.cell_id,
        )
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    if args.delta_mean is None:
        states = {"A": generate_daily(spec)}
    else:
        a, b = two_state_scenario(spec, args.delta_mean, args.winter_sd_ratio)
        states = {"A": a, "B": b}
    files = {}
    for label, series in states.items():
        csv_path = args.out / f"{spec.cell_id}_{label}.csv"
        write_daily_csv(series, csv_path)
        record = CellRecord(spec.cell_id, series.latitude, series.longitude, csv_path, series.variable)
        manifest = write_manifest([record], args.out / f"state{label}.json")
        files[label] = {"csv": csv_path.name, "manifest": manifest.name}
    document = {
        "schema": reports.schema_id("simulate"),
        "spec": asdict(spec),
        "delta_mean": args.delta_mean,
        "winter_sd_ratio": args.winter_sd_ratio if args.delta_mean is not None else None,
        "files": files,
    }
    rows = [[label, f["csv"], f["manifest"]] for label, f in files.items()]
    _emit(args.out, spec.cell_id, "simulate", document, ["state", "csv", "manifest"], rows)


COMMANDS = {
    "fit": _cmd_fit,
    "return-levels": _cmd_return_levels,
    "change": _cmd_change,
    "qq": _cmd_qq,
    "block-diagnostic": _cmd_block_diagnostic,
    "segment-experiment": _cmd_segment_experiment,
    "simulate": _cmd_simulate,
}


LIST_OPTIONS = ("--params", "--periods", "--blocks")


def _join_list_values(argv: list[str]) -> list[str]:
    """Turn ``--params -41.9,7.2`` into ``--params=-41.9,7.2``.

    argparse would otherwise read a list starting with a minus sign as an
    option.
    """
    out, i = [], 0
    while i < len(argv):
        token = argv[i]
        if token in LIST_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") and "," in argv[i + 1]:
            out.append(f"{token}={argv[i + 1]}")
            i += 2
        else:
            out.append(token)
            i += 1
    return out


def run_command(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit status."""
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_join_list_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except (CommandError, IngestError, FitError, GevDomainError, ValueError, OSError) as exc:
        print(f"blockext {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
