"""Daily CSV files, grid manifests and atomic file output.

A daily file has the header ``year,day,value`` followed by one row per day of
a 365-day calendar, in order, covering whole years. A manifest is a JSON
array of cell records::

    [{"cell_id": "ID", "latitude": 44.0, "longitude": -114.4,
      "path": "id_tmin.csv", "variable": "tmin"}]

Relative paths are resolved against the manifest's directory.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blocks import DAYS_PER_YEAR, DailySeries, Variable

__all__ = [
    "CellRecord",
    "IngestError",
    "atomic_write_text",
    "daily_csv_text",
    "ingest",
    "load_cells",
    "load_manifest",
    "write_daily_csv",
    "write_manifest",
]

HEADER = ("year", "day", "value")


class IngestError(ValueError):
    """Malformed daily file or manifest."""


@dataclass(frozen=True)
class CellRecord:
    cell_id: str
    latitude: float
    longitude: float
    path: Path
    variable: Variable

    def load(self) -> DailySeries:
        return ingest(self.path, self.cell_id, self.latitude, self.longitude, self.variable)


def _parse_row(row: list[str], line: int) -> tuple[int, int, float]:
    if len(row) != 3:
        raise IngestError(f"line {line}: expected 3 fields, got {len(row)}")
    try:
        year, day, value = int(row[0]), int(row[1]), float(row[2])
    except ValueError as exc:
        raise IngestError(f"line {line}: {exc}") from None
    if not 1 <= day <= DAYS_PER_YEAR:
        raise IngestError(f"line {line}: day {day} outside 1..{DAYS_PER_YEAR} (no-leap calendar)")
    if not math.isfinite(value):
        raise IngestError(f"line {line}: value is not finite")
    return year, day, value


def ingest(
    path: str | os.PathLike,
    cell_id: str | None = None,
    latitude: float = math.nan,
    longitude: float = math.nan,
    variable: Variable | str = Variable.TMAX,
) -> DailySeries:
    """Read and validate a daily ``year,day,value`` file.

    Raises:
        IngestError: On a bad header, malformed row, day outside 1..365,
            duplicate or missing day, or an incomplete final year. Row errors
            carry the line number.
    """
    path = Path(path)
    values: list[float] = []
    start_year = None
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip().lower() for h in header) != HEADER:
            raise IngestError(f"{path}: header must be 'year,day,value'")
        expected = None
        for row in reader:
            line = reader.line_num
            if not row or all(not field.strip() for field in row):
                continue
            year, day, value = _parse_row(row, line)
            if expected is None:
                if day != 1:
                    raise IngestError(f"line {line}: year {year} starts at day {day}, not day 1")
                start_year = year
            elif (year, day) != expected:
                if (year, day) < expected:
                    raise IngestError(f"line {line}: duplicate or out-of-order day {year}/{day}")
                raise IngestError(
                    f"line {line}: missing day(s) before {year}/{day} (expected {expected[0]}/{expected[1]})"
                )
            values.append(value)
            expected = (year, day + 1) if day < DAYS_PER_YEAR else (year + 1, 1)
    if not values:
        raise IngestError(f"{path}: no data rows")
    if expected[1] != 1:
        raise IngestError(f"{path}: year {expected[0]} is incomplete ({expected[1] - 1} of {DAYS_PER_YEAR} days)")
    return DailySeries(
        np.array(values),
        cell_id=cell_id if cell_id is not None else path.stem,
        latitude=latitude,
        longitude=longitude,
        start_year=start_year,
        variable=variable,
    )


def daily_csv_text(series: DailySeries) -> str:
    """Lossless CSV text of ``series`` (floats written with ``repr``)."""
    lines = [",".join(HEADER)]
    for i, value in enumerate(series.values.tolist()):
        year, day = divmod(i, DAYS_PER_YEAR)
        lines.append(f"{series.start_year + year},{day + 1},{value!r}")
    return "\n".join(lines) + "\n"


def atomic_write_text(path: str | os.PathLike, text: str) -> Path:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_daily_csv(series: DailySeries, path: str | os.PathLike) -> Path:
    return atomic_write_text(path, daily_csv_text(series))


def _float_field(record: dict, key: str, where: str) -> float:
    value = record.get(key)
    if value is None:
        return math.nan
    try:
        return float(value)
    except (TypeError, ValueError):
        raise IngestError(f"{where}: {key} must be a number") from None


def load_manifest(path: str | os.PathLike) -> list[CellRecord]:
    """Parse a manifest and check that cell ids are unique and files exist."""
    path = Path(path)
    try:
        records = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise IngestError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(records, list):
        raise IngestError(f"{path}: manifest must be a JSON array of cell records")
    cells, seen = [], set()
    for i, record in enumerate(records):
        where = f"{path} record {i}"
        if not isinstance(record, dict):
            raise IngestError(f"{where}: not an object")
        for key in ("cell_id", "path"):
            if key not in record:
                raise IngestError(f"{where}: missing {key!r}")
        cell_id = str(record["cell_id"])
        if cell_id in seen:
            raise IngestError(f"{where}: duplicate cell_id {cell_id!r}")
        seen.add(cell_id)
        file_path = Path(record["path"])
        if not file_path.is_absolute():
            file_path = path.parent / file_path
        if not file_path.is_file():
            raise IngestError(f"{where}: file not found: {file_path}")
        try:
            variable = Variable(str(record.get("variable", "tmax")).lower())
        except ValueError:
            raise IngestError(f"{where}: variable must be 'tmax' or 'tmin'") from None
        cells.append(
            CellRecord(
                cell_id=cell_id,
                latitude=_float_field(record, "latitude", where),
                longitude=_float_field(record, "longitude", where),
                path=file_path,
                variable=variable,
            )
        )
    return cells


def write_manifest(cells: list[CellRecord], path: str | os.PathLike) -> Path:
    """Write a manifest with paths relative to its own directory when possible."""
    path = Path(path)
    records = []
    for cell in cells:
        try:
            rel = os.path.relpath(cell.path, path.parent)
        except ValueError:
            rel = str(cell.path)
        records.append(
            {
                "cell_id": cell.cell_id,
                "latitude": None if math.isnan(cell.latitude) else cell.latitude,
                "longitude": None if math.isnan(cell.longitude) else cell.longitude,
                "path": Path(rel).as_posix(),
                "variable": cell.variable.value,
            }
        )
    return atomic_write_text(path, json.dumps(records, indent=2) + "\n")


def load_cells(path: str | os.PathLike, variable: Variable | str = Variable.TMAX) -> list[CellRecord]:
    """Cells from a manifest, or a single cell from a daily CSV file.

    A file whose first non-blank character is ``[`` is read as a manifest.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"file not found: {path}")
    with path.open() as fh:
        head = fh.read(4096).lstrip()
    if head.startswith("["):
        return load_manifest(path)
    return [CellRecord(path.stem, math.nan, math.nan, path, Variable(variable))]
