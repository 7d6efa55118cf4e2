"""JSON and CSV report documents.

Every JSON report carries ``"schema": "blockext/<kind>/v1"``; the matching
JSON Schema ships in ``blockext/schemas/<kind>.schema.json``. Floats are
written with Python's shortest round-trip representation, and non-finite
values become ``null``.
"""

from __future__ import annotations

import json
import math
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

from .blocks import Season
from .changes import ChangeReport
from .fit import FitResult
from .gevcore import GevParams, Orientation
from .qq import QQPairs
from .sensitivity import BlockDiagnostic, SegmentExperiment
from .uncertainty import BootstrapConfig, BootstrapResult

__all__ = [
    "SCHEMA_VERSION",
    "block_diagnostic_document",
    "change_document",
    "csv_text",
    "dumps",
    "extreme_label",
    "fit_document",
    "load_schema",
    "qq_document",
    "return_levels_document",
    "schema_id",
    "segment_document",
]

SCHEMA_VERSION = "v1"
# segment fits with |xi| beyond this are counted in segment reports
SHAPE_LIMIT = 0.6
REPORT_KINDS = ("fit", "return-levels", "change", "qq", "block-diagnostic", "segment-experiment", "simulate")


def schema_id(kind: str) -> str:
    return f"blockext/{kind}/{SCHEMA_VERSION}"


def load_schema(kind: str) -> dict:
    if kind not in REPORT_KINDS:
        raise KeyError(kind)
    text = resources.files("blockext").joinpath("schemas", f"{kind}.schema.json").read_text()
    return json.loads(text)


def clean(obj):
    """Convert to plain JSON types; NaN and infinities become None."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(clean(k)): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, Path):
        return obj.as_posix()
    return obj


def dumps(document: dict) -> str:
    return json.dumps(clean(document), indent=2, allow_nan=False) + "\n"


def _csv_field(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return repr(value) if math.isfinite(value) else ""
    return str(value)


def csv_text(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_csv_field(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def extreme_label(orientation: Orientation) -> str:
    return "warm" if orientation is Orientation.MAXIMA else "cold"


def _params(params: GevParams) -> dict:
    return {"mu": params.mu, "sigma": params.sigma, "xi": params.xi}


def _cell(cell) -> dict:
    return {
        "cell_id": cell.cell_id,
        "latitude": cell.latitude,
        "longitude": cell.longitude,
        "variable": cell.variable,
    }


def _config(config: BootstrapConfig) -> dict:
    return {
        "n_replicates": config.n_replicates,
        "scheme": config.scheme,
        "block_length": config.block_length,
        "seed": config.seed,
        "level": config.level,
    }


def _bootstrap(boot: BootstrapResult) -> dict:
    envelopes = {name: {"lower": lo, "upper": hi} for name, (lo, hi) in boot.quantile_envelopes.items()}
    return {
        **_config(boot.config),
        "n_failed": boot.n_failed,
        "unreliable": boot.unreliable,
        "standard_errors": boot.standard_errors,
        "envelopes": envelopes,
    }


def fit_document(cell, fit_result: FitResult, boot: BootstrapResult | None = None) -> dict:
    orientation = fit_result.params.orientation
    return {
        "schema": schema_id("fit"),
        **_cell(cell),
        "extreme": extreme_label(orientation),
        "orientation": orientation,
        "method": fit_result.method,
        "block_length": fit_result.block_length,
        "n_obs": fit_result.n_obs,
        "converged": fit_result.converged,
        "nll": fit_result.nll,
        "params": _params(fit_result.params),
        "bootstrap": None if boot is None else _bootstrap(boot),
    }


def fit_rows(fit_result: FitResult, boot: BootstrapResult | None = None) -> tuple[list[str], list]:
    header = ["quantity", "estimate", "se", "lower", "upper"]
    rows = []
    for name in ("mu", "sigma", "xi"):
        estimate = getattr(fit_result.params, name)
        if boot is None:
            rows.append([name, estimate, None, None, None])
        else:
            lo, hi = boot.envelope(name)
            rows.append([name, estimate, boot.standard_error(name), lo, hi])
    return header, rows


def return_levels_document(
    cell_id: str,
    params: GevParams,
    periods,
    levels,
    block_length: int = 1,
    method=None,
    lower=None,
    upper=None,
    boot_config: BootstrapConfig | None = None,
) -> dict:
    return {
        "schema": schema_id("return-levels"),
        "cell_id": cell_id,
        "extreme": extreme_label(params.orientation),
        "orientation": params.orientation,
        "method": method,
        "block_length": block_length,
        "params": _params(params),
        "periods": list(periods),
        "levels": list(levels),
        "lower": None if lower is None else list(lower),
        "upper": None if upper is None else list(upper),
        "bootstrap": None if boot_config is None else _config(boot_config),
    }


def return_levels_rows(document: dict) -> tuple[list[str], list]:
    lower = document["lower"] or [None] * len(document["periods"])
    upper = document["upper"] or [None] * len(document["periods"])
    rows = list(zip(document["periods"], document["levels"], lower, upper))
    return ["period", "level", "lower", "upper"], rows


def change_document(report: ChangeReport, method, config: BootstrapConfig) -> dict:
    curve = report.curve
    curve_rows = []
    if curve is not None:
        lower = curve.lower if curve.lower is not None else [None] * curve.periods.size
        upper = curve.upper if curve.upper is not None else [None] * curve.periods.size
        for r, d, lo, hi in zip(curve.periods, curve.delta, lower, upper):
            curve_rows.append({"period": r, "delta": d, "lower": lo, "upper": hi})
    loc = report.location
    season = Season.JJA if report.orientation is Orientation.MAXIMA else Season.DJF
    return {
        "schema": schema_id("change"),
        "cell_id": report.cell_id,
        "extreme": extreme_label(report.orientation),
        "orientation": report.orientation,
        "method": method,
        "state_a": {"params": _params(report.fit_a.params), "n_obs": report.fit_a.n_obs},
        "state_b": {"params": _params(report.fit_b.params), "n_obs": report.fit_b.n_obs},
        "delta_mu": report.delta_mu,
        "delta_sigma": report.delta_sigma,
        "delta_log_sigma": report.delta_log_sigma,
        "delta_xi": report.delta_xi,
        "pvalues": {name: pv.p for name, pv in report.pvalues.items()},
        "marks": report.marks,
        "bootstrap": {
            **_config(config),
            "n_failed_a": report.failed_replicates[0],
            "n_failed_b": report.failed_replicates[1],
        },
        "rl_change_curve": curve_rows,
        "envelope_level": None if curve is None else curve.level,
        "seasonal": None
        if loc is None
        else {"season": season, "m1": loc.m1, "s1": loc.s1, "m2": loc.m2, "s2": loc.s2},
        "predicted_mu2": None if loc is None else loc.predicted_mu2,
        "predicted_delta_mu": None if loc is None else loc.predicted_delta_mu,
        "observed_delta_mu": report.delta_mu,
        "delta_mu_se": report.location_se,
        "ratio_mu_over_mean": None if loc is None else loc.ratio,
    }


def change_rows(document: dict) -> tuple[list[str], list]:
    rows = [[r["period"], r["delta"], r["lower"], r["upper"]] for r in document["rl_change_curve"]]
    return ["period", "delta", "lower", "upper"], rows


def qq_document(cell_id: str, fit_result: FitResult, pairs: QQPairs) -> dict:
    return {
        "schema": schema_id("qq"),
        "cell_id": cell_id,
        "extreme": extreme_label(fit_result.params.orientation),
        "method": fit_result.method,
        "params": _params(fit_result.params),
        "n": int(pairs.empirical.size),
        "max_abs_deviation": pairs.max_abs_deviation,
        "pairs": [
            {"p": p, "empirical": e, "fitted": f}
            for p, e, f in zip(pairs.probabilities, pairs.empirical, pairs.fitted)
        ],
    }


def qq_rows(document: dict) -> tuple[list[str], list]:
    return ["p", "empirical", "fitted"], [[r["p"], r["empirical"], r["fitted"]] for r in document["pairs"]]


def block_diagnostic_document(diag: BlockDiagnostic, orientation: Orientation, config: BootstrapConfig) -> dict:
    return {
        "schema": schema_id("block-diagnostic"),
        "cell_id": diag.cell_id,
        "extreme": extreme_label(orientation),
        "xi_by_block": {str(b): xi for b, xi in diag.xi_by_block.items()},
        "long_block": diag.long_block,
        "xi_diff": diag.xi_diff,
        "pvalue": diag.pvalue,
        "alpha": diag.alpha,
        "flagged": diag.flagged,
        "n_failed": diag.n_failed,
        "bootstrap": _config(config),
    }


def block_diagnostic_rows(document: dict) -> tuple[list[str], list]:
    return ["block_length", "xi"], [[int(b), xi] for b, xi in document["xi_by_block"].items()]


def segment_document(exp: SegmentExperiment, cell_id: str) -> dict:
    periods = exp.return_periods
    return {
        "schema": schema_id("segment-experiment"),
        "cell_id": cell_id,
        "extreme": extreme_label(exp.orientation),
        "method": exp.method,
        "segment_length": exp.segment_length,
        "n_pairs": exp.n_pairs,
        "return_periods": list(periods),
        "truth": {f"{r:g}": t for r, t in zip(periods, exp.truth)},
        "summary": {f"{r:g}": s for r, s in exp.summary().items()},
        "shape_limit": SHAPE_LIMIT,
        "n_shape_beyond_limit": int(np.sum(np.abs(exp.xi_a) > SHAPE_LIMIT) + np.sum(np.abs(exp.xi_b) > SHAPE_LIMIT)),
    }


def segment_rows(exp: SegmentExperiment) -> tuple[list[str], list]:
    labels = [f"{r:g}" for r in exp.return_periods]
    header = ["pair", "first_year", "xi_a", "xi_b"] + [f"delta_{r}" for r in labels] + [f"error_{r}" for r in labels]
    rows = []
    errors = exp.errors
    for i in range(exp.n_pairs):
        rows.append(
            [i, i * exp.segment_length, exp.xi_a[i], exp.xi_b[i]] + list(exp.estimates[i]) + list(errors[i])
        )
    return header, rows
