from __future__ import annotations

import json
import math

import numpy as np
import pytest

from blockext.blocks import DAYS_PER_YEAR, BlockExtremes, DailySeries, Variable
from blockext.dataio import (
    CellRecord,
    IngestError,
    daily_csv_text,
    ingest,
    load_cells,
    load_manifest,
    write_daily_csv,
    write_manifest,
)
from blockext.fit import FitResult, Method
from blockext.gevcore import GevParams
from blockext.qq import qq_pairs


def rows(n_years: int, start_year: int = 2000):
    for i in range(n_years * DAYS_PER_YEAR):
        year, day = divmod(i, DAYS_PER_YEAR)
        yield [start_year + year, day + 1, float(i % 17) - 3.5]


def write_rows(path, data, header="year,day,value"):
    lines = [header] + [",".join(str(v) for v in r) for r in data]
    path.write_text("\n".join(lines) + "\n")
    return path


class TestIngest:
    def test_round_trip_is_lossless(self, tmp_path):
        values = np.random.default_rng(0).normal(size=2 * DAYS_PER_YEAR) * 7.123456789
        series = DailySeries(values, start_year=1850, cell_id="c")
        path = write_daily_csv(series, tmp_path / "c.csv")
        back = ingest(path)
        assert np.array_equal(back.values, series.values)
        assert back.start_year == 1850 and back.cell_id == "c"
        assert daily_csv_text(back) == path.read_text()

    def test_reads_values_in_order(self, tmp_path):
        s = ingest(write_rows(tmp_path / "a.csv", rows(2)), "x", 10.0, 20.0, "tmin")
        assert s.n_years == 2 and s.values[0] == -3.5 and s.values[16] == 12.5
        assert s.variable is Variable.TMIN and s.latitude == 10.0 and s.cell_id == "x"

    def test_bad_header(self, tmp_path):
        with pytest.raises(IngestError, match="header"):
            ingest(write_rows(tmp_path / "a.csv", rows(1), header="y,d,v"))

    def test_day_366_rejected_with_line(self, tmp_path):
        data = list(rows(1))
        data[10][1] = 366
        with pytest.raises(IngestError, match="line 12: day 366"):
            ingest(write_rows(tmp_path / "a.csv", data))

    def test_unparseable_value(self, tmp_path):
        data = list(rows(1))
        data[4][2] = "warm"
        with pytest.raises(IngestError, match="line 6"):
            ingest(write_rows(tmp_path / "a.csv", data))

    def test_nan_value(self, tmp_path):
        data = list(rows(1))
        data[4][2] = "nan"
        with pytest.raises(IngestError, match="not finite"):
            ingest(write_rows(tmp_path / "a.csv", data))

    def test_wrong_field_count(self, tmp_path):
        data = list(rows(1))
        data[2] = data[2] + [1]
        with pytest.raises(IngestError, match="line 4: expected 3 fields"):
            ingest(write_rows(tmp_path / "a.csv", data))

    def test_missing_day(self, tmp_path):
        data = list(rows(2))
        del data[100]
        with pytest.raises(IngestError, match="missing day"):
            ingest(write_rows(tmp_path / "a.csv", data))

    def test_duplicate_day(self, tmp_path):
        data = list(rows(1))
        data.insert(50, list(data[49]))
        with pytest.raises(IngestError, match="duplicate"):
            ingest(write_rows(tmp_path / "a.csv", data))

    def test_incomplete_final_year(self, tmp_path):
        data = list(rows(2))[:-5]
        with pytest.raises(IngestError, match="year 2001 is incomplete"):
            ingest(write_rows(tmp_path / "a.csv", data))

    def test_must_start_on_day_one(self, tmp_path):
        with pytest.raises(IngestError, match="starts at day 2"):
            ingest(write_rows(tmp_path / "a.csv", list(rows(1))[1:]))

    def test_empty(self, tmp_path):
        with pytest.raises(IngestError, match="no data"):
            ingest(write_rows(tmp_path / "a.csv", []))


class TestManifest:
    def test_round_trip(self, tmp_path):
        (tmp_path / "data").mkdir()
        csv = write_rows(tmp_path / "data" / "c1.csv", rows(1))
        cells = [CellRecord("c1", 45.0, -70.0, csv, Variable.TMIN)]
        path = write_manifest(cells, tmp_path / "m.json")
        record = json.loads(path.read_text())[0]
        assert record["path"] == "data/c1.csv"
        loaded = load_manifest(path)
        assert loaded[0].cell_id == "c1" and loaded[0].variable is Variable.TMIN
        assert loaded[0].path == tmp_path / "data" / "c1.csv" and loaded[0].latitude == 45.0
        assert loaded[0].load().n_years == 1

    def test_duplicate_ids(self, tmp_path):
        write_rows(tmp_path / "a.csv", rows(1))
        (tmp_path / "m.json").write_text(json.dumps([{"cell_id": "a", "path": "a.csv"}] * 2))
        with pytest.raises(IngestError, match="duplicate cell_id"):
            load_manifest(tmp_path / "m.json")

    def test_missing_file(self, tmp_path):
        (tmp_path / "m.json").write_text(json.dumps([{"cell_id": "a", "path": "nope.csv"}]))
        with pytest.raises(IngestError, match="file not found"):
            load_manifest(tmp_path / "m.json")

    def test_not_an_array(self, tmp_path):
        (tmp_path / "m.json").write_text("{}")
        with pytest.raises(IngestError):
            load_manifest(tmp_path / "m.json")

    def test_optional_coordinates(self, tmp_path):
        write_rows(tmp_path / "a.csv", rows(1))
        (tmp_path / "m.json").write_text(json.dumps([{"cell_id": "a", "path": "a.csv"}]))
        cell = load_manifest(tmp_path / "m.json")[0]
        assert math.isnan(cell.latitude) and cell.variable is Variable.TMAX

    def test_load_cells_dispatch(self, tmp_path):
        csv = write_rows(tmp_path / "cellx.csv", rows(1))
        assert load_cells(csv, "tmin")[0].cell_id == "cellx"
        write_manifest([CellRecord("y", 0.0, 0.0, csv, Variable.TMAX)], tmp_path / "m.json")
        assert load_cells(tmp_path / "m.json")[0].cell_id == "y"
        with pytest.raises(IngestError):
            load_cells(tmp_path / "absent.csv")


class TestQQ:
    def test_gumbel_three_points(self):
        f = FitResult(GevParams(0, 1, 0), Method.ML, 3)
        pairs = qq_pairs(BlockExtremes([3.0, 1.0, 2.0]), f)
        assert pairs.probabilities.tolist() == [0.25, 0.5, 0.75]
        assert pairs.empirical.tolist() == [1.0, 2.0, 3.0]
        expected = [-math.log(-math.log(p)) for p in (0.25, 0.5, 0.75)]
        assert np.allclose(pairs.fitted, expected, rtol=1e-12)
        assert pairs.max_abs_deviation == pytest.approx(max(abs(a - b) for a, b in zip([1, 2, 3], expected)))

    def test_minima(self):
        f = FitResult(GevParams(0, 1, 0, "min"), Method.ML, 3)
        pairs = qq_pairs(BlockExtremes([-3.0, -1.0, -2.0], "min"), f)
        assert np.all(np.diff(pairs.fitted) > 0)
        # minima quantiles mirror maxima quantiles at 1 - p
        assert np.allclose(pairs.fitted, [math.log(-math.log(1 - p)) for p in (0.25, 0.5, 0.75)])

    def test_orientation_mismatch(self):
        f = FitResult(GevParams(0, 1, 0), Method.ML, 3)
        with pytest.raises(ValueError):
            qq_pairs(BlockExtremes([1.0, 2.0, 3.0], "min"), f)
